#include "srg/nelson.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "srg/cutoff.hpp"
#include "srg/rg.hpp"
#include "srg/rng.hpp"
#include "srg/verify.hpp"

namespace srg {

NelsonConfig NelsonConfig::default_toy(const MomentumGrid& grid, int n_p, double gap, double g,
                                       double mu) {
  NelsonConfig c;
  c.grid = grid;
  c.g = g;
  c.mu = mu;
  c.levels.resize(n_p);
  for (int i = 0; i < n_p; ++i) c.levels[i] = i * gap;
  c.kappa.resize(grid.n_modes);
  for (int i = 0; i < grid.n_modes; ++i) c.kappa[i] = std::pow(grid.k[i], mu + 0.5);
  c.coupling.resize(grid.n_modes);
  for (int i = 0; i < grid.n_modes; ++i) {
    MatC G = MatC::Identity(n_p, n_p);
    double off = 1.0 / (1.0 + grid.k[i]);
    for (int a = 0; a < n_p; ++a)
      for (int b = 0; b < n_p; ++b)
        if (a != b) G(a, b) = off;
    c.coupling[i] = G;
  }
  c.normalize_kappa();
  return c;
}

double NelsonConfig::kappa_norm_mu() const {
  double s = 0.0;
  for (int i = 0; i < grid.n_modes; ++i)
    s += grid.w[i] * kappa[i] * kappa[i] * std::pow(grid.k[i], -(1.0 + 2.0 * mu));
  return std::sqrt(s);
}

void NelsonConfig::normalize_kappa() {
  double nrm = kappa_norm_mu();
  if (!(nrm > 0.0)) throw std::invalid_argument("kappa must not vanish");
  for (auto& v : kappa) v /= nrm;
}

FockOperator build_nelson(const NelsonConfig& cfg, const BasisPtr& basis) {
  if (!cfg.grid.same_as(basis->grid())) throw std::invalid_argument("grid mismatch");
  if (basis->particle_dim() != cfg.n_p())
    throw std::invalid_argument("basis particle dimension does not match the level count");
  const auto& g = cfg.grid;
  const int np = cfg.n_p();
  const std::size_t fd = basis->fock_dim();
  MatC h = MatC::Zero(basis->dim(), basis->dim());

  for (std::size_t i = 0; i < basis->dim(); ++i) {
    int p = basis->particle_of(i);
    h(i, i) = cfg.levels[p] + basis->field_energy(basis->fock_of(i));
  }

  for (int mode = 0; mode < g.n_modes; ++mode) {
    double leg = cfg.g * std::sqrt(g.w[mode] / g.k[mode]) * cfg.kappa[mode];
    const MatC& G = cfg.coupling[mode];
    for (std::size_t f = 0; f < fd; ++f) {
      const auto& occ = basis->occ(f);
      auto t = occ;
      t[mode] += 1;
      long tf = basis->find(t);
      if (tf < 0) continue;
      double amp = leg * std::sqrt(double(occ[mode] + 1));
      for (int a = 0; a < np; ++a)
        for (int b = 0; b < np; ++b) {
          // creation block G (x) A^+, annihilation block G^+ (x) A
          h(a * fd + tf, b * fd + f) += amp * G(a, b);
          h(b * fd + f, a * fd + tf) += amp * std::conj(G(a, b));
        }
    }
  }
  FockOperator out(basis, std::move(h), false);
  if (out.hermiticity_defect() > 1e-12)
    throw std::runtime_error("assembled interaction is not hermitian; check couplings");
  out.hermitian = true;
  return out;
}

RelativeBound interaction_relative_bound(const NelsonConfig& cfg, const BasisPtr& basis,
                                         std::uint64_t seed, int n_samples) {
  FockOperator hg = build_nelson(cfg, basis);
  MatC h0 = MatC::Zero(basis->dim(), basis->dim());
  for (std::size_t i = 0; i < basis->dim(); ++i)
    h0(i, i) = cfg.levels[basis->particle_of(i)] + basis->field_energy(basis->fock_of(i));
  MatC w = hg.mat - h0;

  Rng rng(seed);
  double worst_a = 0.0, worst_b = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    VecC psi(basis->dim());
    for (Eigen::Index i = 0; i < psi.size(); ++i) psi[i] = Complex(rng.normal(), rng.normal());
    psi /= psi.norm();
    double iw = (w * psi).norm();
    double h0n = (h0 * psi).norm();
    // attribute half the weight to each term of the Kato bound
    worst_a = std::max(worst_a, 0.5 * iw / std::max(h0n, 1e-300));
    worst_b = std::max(worst_b, 0.5 * iw);
  }
  return {worst_a, worst_b};
}

KernelFamily initial_decimation(const NelsonConfig& cfg, const FockOperator& h_g, double lambda,
                                double rho0, const BasisPtr& flow_basis, InitialReport* report) {
  const BasisPtr& tb = h_g.basis;
  if (tb->particle_dim() != cfg.n_p()) throw std::invalid_argument("tensor basis mismatch");
  if (flow_basis->particle_dim() != 1)
    throw std::invalid_argument("flow basis must be scalar (one particle level)");
  if (!tb->grid().same_as(flow_basis->grid())) throw std::invalid_argument("grid mismatch");
  const double e0 = cfg.levels[0];
  if (lambda > e0 + 0.5 * rho0 + 1e-12)
    throw std::invalid_argument("lambda outside the initial spectral window");
  if (rho0 < 100.0 * cfg.g * cfg.g)
    throw std::invalid_argument("rho0 must dominate g^2 (rho0 >= 100 g^2)");
  if (rho0 > cfg.gap() + 1e-12)
    throw std::invalid_argument("rho0 must not exceed the particle gap");
  if (std::abs(rho0 - 1.0) > 1e-14) grid_power(rho0, cfg.grid.sigma);  // sigma power or 1

  // tau_0(H - lambda) = H_0 - lambda; pi_0 = P_ground (x) chi_{H_f <= rho0}
  MatC h0 = MatC::Zero(tb->dim(), tb->dim());
  for (std::size_t i = 0; i < tb->dim(); ++i)
    h0(i, i) = cfg.levels[tb->particle_of(i)] + tb->field_energy(tb->fock_of(i)) - lambda;
  MatC hm = h_g.mat - lambda * MatC::Identity(tb->dim(), tb->dim());

  Partition part = Partition::ground_sector_cutoff(tb, rho0);
  FeshbachResult fr = feshbach_map(FockOperator(tb, hm, false), FockOperator(tb, h0, false), part);

  // restrict to the ground particle sector
  const std::size_t fd = tb->fock_dim();
  MatC f0 = fr.f.mat.topLeftCorner(fd, fd);
  FockOperator f_restricted(flow_basis, std::move(f0), false);
  f_restricted.hermitian = f_restricted.hermiticity_defect() <= 1e-12;

  ExtractOptions eo;
  eo.scale = rho0;
  ExtractReport erep;
  KernelFamily fam =
      extract_kernels(f_restricted, cfg.grid, eo, &erep, cfg.mu, 2, KernelFamily{}.xi);
  if (std::abs(rho0 - 1.0) > 1e-14) fam = scale_kernels(fam, rho0);

  if (report) {
    report->lambda = lambda;
    report->rho0 = rho0;
    report->margin = fr.invertibility_margin;
    report->complement_bound = 0.875 * cfg.gap();
    report->extract = erep;
    // coordinates after removing the decoupled constant rho0^-1 (e0 - lambda)
    KernelFamily shifted = fam;
    Complex c0 = Complex((e0 - lambda) / rho0, 0.0);
    for (auto& v : shifted.w00) v -= c0;
    PolydiscParams pd = polydisc_membership(shifted);
    report->alpha0 = pd.alpha;
    report->beta0 = pd.beta;
    report->gamma0 = pd.gamma;
  }
  return fam;
}

std::string InitialAuditReport::to_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"window_hi\":" << window_hi << ",\"worst_error\":" << worst_error << ",\"rows\":[";
  for (std::size_t i = 0; i < rows.size(); ++i)
    os << (i ? "," : "") << "{\"oracle\":" << rows[i].oracle_energy
       << ",\"reconstructed\":" << rows[i].reconstructed << ",\"error\":" << rows[i].error
       << ",\"iterations\":" << rows[i].iterations << "}";
  os << "]}";
  return os.str();
}

InitialAuditReport initial_audit(const NelsonConfig& cfg, const BasisPtr& tensor_basis,
                                 const BasisPtr& flow_basis, double rho0, int n_levels) {
  FockOperator hg = build_nelson(cfg, tensor_basis);
  EigenSystem oracle = exact_diag(hg);

  InitialAuditReport rep;
  rep.window_hi = cfg.levels[0] + 0.5 * rho0;

  int done = 0;
  for (Eigen::Index i = 0; i < oracle.values.size() && done < n_levels; ++i) {
    double target = oracle.values[i];
    if (target > rep.window_hi) break;
    double lam = target;
    int it = 0;
    double recon = lam;
    for (; it < 30; ++it) {
      KernelFamily fam = initial_decimation(cfg, hg, lam, rho0, flow_basis, nullptr);
      FockOperator h_eff = assemble_hamiltonian(fam, flow_basis, 1.0);
      if (h_eff.hermiticity_defect() > 1e-10) h_eff.mat = 0.5 * (h_eff.mat + h_eff.mat.adjoint());
      h_eff.hermitian = true;
      EigenSystem es = exact_diag(h_eff);
      // secular update: the eigenvalue branch nearest zero tracks this level
      double best = es.values[0];
      for (Eigen::Index q = 0; q < es.values.size(); ++q)
        if (std::abs(es.values[q]) < std::abs(best)) best = es.values[q];
      recon = lam + rho0 * best;
      if (std::abs(recon - lam) < 1e-12) break;
      lam = recon;
    }
    InitialAuditRow row;
    row.oracle_energy = target;
    row.reconstructed = recon;
    row.error = std::abs(recon - target);
    row.iterations = it + 1;
    rep.rows.push_back(row);
    rep.worst_error = std::max(rep.worst_error, row.error);
    ++done;
  }
  return rep;
}

}  // namespace srg
