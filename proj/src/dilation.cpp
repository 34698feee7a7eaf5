#include "srg/dilation.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace srg {

namespace {

// Antisymmetric Toeplitz bands d_1..d_nb for the one-particle generator.
// With i[diag(k), iD] applied to a plane wave e^{i omega j} the symbol is
// S(omega) = sum_d d_d (A_d cos(omega d) + i B_d sin(omega d)),
// A_d = 2 sinh(d h), B_d = 2(cosh(d h) - 1). Moment conditions S(0)=1,
// S'(0)=0, S''(0)=0 fix three bands; they reduce to the 4-point central
// difference as h -> 0.
Eigen::VectorXd band_coefficients(double h, int nb) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nb, nb);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nb);
  rhs[0] = 1.0;
  for (int d = 1; d <= nb; ++d) {
    double a = 2.0 * std::sinh(d * h);
    double b = 2.0 * (std::cosh(d * h) - 1.0);
    m(0, d - 1) = a;
    if (nb > 1) m(1, d - 1) = d * b;
    if (nb > 2) m(2, d - 1) = double(d) * d * a;
  }
  return m.fullPivLu().solve(rhs);
}

}  // namespace

FockOperator build_dilation_b(const BasisPtr& basis) {
  const auto& g = basis->grid();
  if (g.n_modes < 3) throw std::invalid_argument("dilation generator needs at least 3 modes");
  const int nb = std::min(3, g.n_modes - 1);
  Eigen::VectorXd d = band_coefficients(g.log_step(), nb);

  const Complex I(0.0, 1.0);
  MatC m = MatC::Zero(basis->dim(), basis->dim());
  // B = sum_{ij} beta_{ij} A_i^dagger A_j with beta = i D, assembled through
  // one-photon hops on every basis state
  auto add_hop = [&](int from, int to, Complex beta) {
    for (std::size_t f = 0; f < basis->fock_dim(); ++f) {
      const auto& o = basis->occ(f);
      if (o[from] == 0) continue;
      auto tgt = o;
      tgt[from] -= 1;
      double amp = std::sqrt(static_cast<double>(o[from]));
      tgt[to] += 1;
      long t = basis->find(tgt);
      if (t < 0) continue;
      amp *= std::sqrt(static_cast<double>(tgt[to]));
      for (int p = 0; p < basis->particle_dim(); ++p)
        m(basis->index(p, t), basis->index(p, f)) += beta * amp;
    }
  };
  for (int band = 1; band <= nb; ++band)
    for (int i = 0; i + band < g.n_modes; ++i) {
      add_hop(i + band, i, I * d[band - 1]);
      add_hop(i, i + band, -I * d[band - 1]);
    }
  MatC herm = 0.5 * (m + m.adjoint());
  return FockOperator(basis, std::move(herm), true);
}

FockOperator weight_b_theta(const FockOperator& b, double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("theta must lie in (0,1]");
  Eigen::SelfAdjointEigenSolver<MatC> es(b.mat);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition of B failed");
  VecD w = es.eigenvalues();
  VecC f(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i)
    f[i] = std::pow(1.0 + w[i] * w[i], -theta / 2.0);
  MatC out = es.eigenvectors() * f.asDiagonal() * es.eigenvectors().adjoint();
  return FockOperator(b.basis, 0.5 * (out + out.adjoint()), true);
}

FockOperator ad_b(const FockOperator& b, const FockOperator& x) {
  b.assert_same_basis(x);
  return FockOperator(b.basis, b.mat * x.mat - x.mat * b.mat, false);
}

double dilation_commutator_defect(const BasisPtr& basis) {
  const auto& g = basis->grid();
  const int nk = g.n_modes;
  FockOperator hf = build_hf(basis);
  FockOperator b = build_dilation_b(basis);
  const Complex I(0.0, 1.0);
  MatC comm = I * (hf.mat * b.mat - b.mat * hf.mat);

  // fixed continuum wavepackets in x = ln k: gaussians of width 0.8 centred
  // at fractions of the grid span, supported on interior modes; under grid
  // refinement at fixed span the defect measures the stencil consistency
  const double h = g.log_step();
  const double span = (nk - 1) * h;
  double worst = 0.0;
  for (double frac : {0.35, 0.5, 0.65}) {
    double xc = -span * frac;
    VecC psi = VecC::Zero(basis->dim());
    for (int j = 1; j <= nk - 2; ++j) {
      TruncatedFockBasis::Occ o(nk, 0);
      o[j] = 1;
      long f = basis->find(o);
      if (f < 0) continue;
      double x = (j - (nk - 1)) * h;
      double t = (x - xc) / 0.8;
      psi[basis->index(0, f)] = std::exp(-t * t);
    }
    double nrm = psi.norm();
    if (nrm == 0.0) continue;
    psi /= nrm;
    VecC resid = comm * psi - hf.mat * psi;
    double ref = (hf.mat * psi).norm();
    if (ref > 0.0) worst = std::max(worst, resid.norm() / ref);
  }
  return worst;
}

}  // namespace srg
