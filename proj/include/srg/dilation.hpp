#pragma once

#include "srg/fock.hpp"

namespace srg {

// Self-adjoint dilation generator B, the second quantization of the
// log-momentum derivative i d/dx (x = ln k). On the geometric grid the
// one-particle matrix is i times a real antisymmetric two-band Toeplitz
// stencil; the band coefficients are tuned so that i[H_f,B] = H_f holds to
// second order on smooth wavepackets (the sign convention makes the
// positive-commutator estimate come out with a plus). Exact B = B^dagger by
// construction.
FockOperator build_dilation_b(const BasisPtr& basis);

// <B>^(-theta) = (1 + B^2)^(-theta/2) by spectral decomposition; hermitian,
// positive, norm <= 1.
FockOperator weight_b_theta(const FockOperator& b, double theta);

// ad_B(X) = [B, X]
FockOperator ad_b(const FockOperator& b, const FockOperator& x);

// relative l2 error of (i[H_f,B] - H_f) on smooth one-photon wavepackets
// supported on interior modes; used by the consistency tests
double dilation_commutator_defect(const BasisPtr& basis);

}  // namespace srg
