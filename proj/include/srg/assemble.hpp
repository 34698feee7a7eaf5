#pragma once

#include "srg/fock.hpp"
#include "srg/kernel.hpp"

namespace srg {

// H = w00(H_f) + sum_{1<=m+n<=2} chi1(H_f) W_{m,n} chi1(H_f), with the chi
// sandwich evaluated at scale * 1 (pass scale=rho for a family living at
// photon scale rho). The quadrature replaces dk/|k|^(1/2) by sqrt(w_i/k_i)
// per leg; the operator argument of w is the field energy of the spectator
// content (the state after all annihilations).
FockOperator assemble_hamiltonian(const KernelFamily& f, const BasisPtr& basis,
                                  double scale = 1.0);

// Bare monomial W_{m,n}[w] without the cutoff sandwich.
FockOperator assemble_monomial(const WickKernel& k, const BasisPtr& basis);

struct ExtractOptions {
  double scale = 1.0;      // chi sandwich scale of the operator being read
  double chi_floor = 1e-3; // below this chi-product a coordinate is unsampled
};

struct ExtractReport {
  std::size_t sampled = 0;
  std::size_t unsampled = 0;          // coordinates hidden by the cutoff
  double max_sample_spread = 0.0;     // disagreement between equivalent samples
  // grid r-indices that were matched exactly by a spectator energy, per kernel
  std::vector<std::vector<std::size_t>> exact_r_w00;  // single entry: w00
  double diag_gauge_residual = 0.0;   // magnitude assigned by the same-mode convention
};

// Numerical inverse of the generalized Wick form, m+n <= 2. Requires a
// single particle level. Same-mode w11 diagonals are fixed by the average of
// the adjacent off-diagonal samples (the discrete representation cannot
// separate them from w00 on the operator diagonal); the remainder goes to
// w00, so assemble(extract(H)) reproduces sampled matrix elements exactly.
KernelFamily extract_kernels(const FockOperator& h, const MomentumGrid& grid,
                             const ExtractOptions& opt = {}, ExtractReport* report = nullptr,
                             double mu = 0.5, int s = 2, double xi = 0.6);

struct WickBoundReport {
  double lhs_weighted = 0.0;  // ||(H_f+rho)^(-m/2) W (H_f+rho)^(-n/2)||
  double rhs_weighted = 0.0;  // ||w||_0
  double lhs_cut = 0.0;       // ||chi_rho W chi_rho||
  double rhs_cut = 0.0;       // rho^((m+n)(1+mu)) / sqrt(m! n!) ||w||_mu
  double margin_weighted() const { return rhs_weighted - lhs_weighted; }
  double margin_cut() const { return rhs_cut - lhs_cut; }
};

WickBoundReport wick_bound_check(const WickKernel& k, double mu, double rho,
                                 const BasisPtr& basis);

}  // namespace srg
