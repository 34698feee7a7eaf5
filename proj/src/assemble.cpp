#include "srg/assemble.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace srg {

namespace {

struct Transition {
  std::size_t from, to;
  double amp;      // occupancy amplitude times quadrature factors
  double r_arg;    // spectator field energy
  int j1, j2;      // kernel mode arguments (j2 = -1 for first order)
  double e_from, e_to;
};

// Enumerate the transitions of one monomial type on the basis. amp carries
// sqrt(n...) occupancy factors, the sqrt(w/k) quadrature legs and the ordered
// tuple multiplicity; the caller multiplies by the kernel value and cutoffs.
template <typename Fn>
void for_each_transition(const BasisPtr& basis, int m, int n, Fn&& fn) {
  const auto& g = basis->grid();
  const int nk = g.n_modes;
  auto leg = [&](int j) { return std::sqrt(g.w[j] / g.k[j]); };
  const std::size_t fd = basis->fock_dim();

  for (std::size_t f = 0; f < fd; ++f) {
    const auto& occ = basis->occ(f);
    const double es = basis->field_energy(f);
    if (m == 1 && n == 0) {
      for (int j = 0; j < nk; ++j) {
        auto t = occ;
        t[j] += 1;
        long tf = basis->find(t);
        if (tf < 0) continue;
        double amp = std::sqrt(double(occ[j] + 1)) * leg(j);
        fn(Transition{f, std::size_t(tf), amp, es, j, -1, es, es + g.k[j]});
      }
    } else if (m == 0 && n == 1) {
      for (int j = 0; j < nk; ++j) {
        if (occ[j] == 0) continue;
        auto t = occ;
        t[j] -= 1;
        long tf = basis->find(t);
        if (tf < 0) continue;
        double amp = std::sqrt(double(occ[j])) * leg(j);
        fn(Transition{f, std::size_t(tf), amp, es - g.k[j], j, -1, es, es - g.k[j]});
      }
    } else if (m == 1 && n == 1) {
      for (int l = 0; l < nk; ++l) {
        if (occ[l] == 0) continue;
        auto mid = occ;
        mid[l] -= 1;
        double em = es - g.k[l];
        for (int j = 0; j < nk; ++j) {
          auto t = mid;
          t[j] += 1;
          long tf = basis->find(t);
          if (tf < 0) continue;
          double amp = std::sqrt(double(occ[l])) * std::sqrt(double(mid[j] + 1)) * leg(j) * leg(l);
          fn(Transition{f, std::size_t(tf), amp, em, j, l, es, em + g.k[j]});
        }
      }
    } else if (m == 2 && n == 0) {
      for (int j1 = 0; j1 < nk; ++j1)
        for (int j2 = j1; j2 < nk; ++j2) {
          auto t = occ;
          t[j2] += 1;
          double amp2 = std::sqrt(double(t[j2]));
          t[j1] += 1;
          double amp1 = std::sqrt(double(t[j1]));
          long tf = basis->find(t);
          if (tf < 0) continue;
          double mult = (j1 == j2) ? 1.0 : 2.0;  // ordered tuple sum, symmetric kernel
          double amp = mult * amp1 * amp2 * leg(j1) * leg(j2);
          fn(Transition{f, std::size_t(tf), amp, es, j1, j2, es, es + g.k[j1] + g.k[j2]});
        }
    } else if (m == 0 && n == 2) {
      for (int l1 = 0; l1 < nk; ++l1)
        for (int l2 = l1; l2 < nk; ++l2) {
          auto t = occ;
          if (t[l2] == 0) continue;
          double amp2 = std::sqrt(double(t[l2]));
          t[l2] -= 1;
          if (t[l1] == 0) continue;
          double amp1 = std::sqrt(double(t[l1]));
          t[l1] -= 1;
          long tf = basis->find(t);
          if (tf < 0) continue;
          double et = es - g.k[l1] - g.k[l2];
          double mult = (l1 == l2) ? 1.0 : 2.0;
          double amp = mult * amp1 * amp2 * leg(l1) * leg(l2);
          fn(Transition{f, std::size_t(tf), amp, et, l1, l2, es, et});
        }
    } else {
      throw std::invalid_argument("monomial order outside m+n <= 2");
    }
  }
}

}  // namespace

FockOperator assemble_hamiltonian(const KernelFamily& f, const BasisPtr& basis, double scale) {
  if (!f.grid.same_as(basis->grid()))
    throw std::invalid_argument("kernel family grid does not match basis grid");
  const std::size_t dim = basis->dim();
  MatC h = MatC::Zero(dim, dim);

  for (std::size_t i = 0; i < dim; ++i)
    h(i, i) = f.w00_at(basis->field_energy(basis->fock_of(i)));

  const int np = basis->particle_dim();
  const std::size_t fd = basis->fock_dim();
  for (const auto& k : f.kernels) {
    for_each_transition(basis, k.m, k.n, [&](const Transition& t) {
      double chi = CutoffProfile::chi_scaled(t.e_to, scale) *
                   CutoffProfile::chi_scaled(t.e_from, scale);
      if (chi == 0.0) return;
      Complex val = (k.order() == 1) ? k.eval(t.r_arg, t.j1) : k.eval(t.r_arg, t.j1, t.j2);
      Complex add = chi * t.amp * val;
      for (int p = 0; p < np; ++p) h(p * fd + t.to, p * fd + t.from) += add;
    });
  }
  FockOperator out(basis, std::move(h), false);
  out.hermitian = out.hermiticity_defect() <= 1e-12;
  return out;
}

FockOperator assemble_monomial(const WickKernel& k, const BasisPtr& basis) {
  const std::size_t dim = basis->dim();
  MatC h = MatC::Zero(dim, dim);
  const int np = basis->particle_dim();
  const std::size_t fd = basis->fock_dim();
  for_each_transition(basis, k.m, k.n, [&](const Transition& t) {
    Complex val = (k.order() == 1) ? k.eval(t.r_arg, t.j1) : k.eval(t.r_arg, t.j1, t.j2);
    Complex add = t.amp * val;
    for (int p = 0; p < np; ++p) h(p * fd + t.to, p * fd + t.from) += add;
  });
  return FockOperator(basis, std::move(h), false);
}

namespace {

// assign collected (energy, value) samples onto grid r-points
void onto_grid(const std::vector<std::pair<double, Complex>>& samples_in,
               const std::vector<double>& rpts, std::vector<Complex>& out,
               std::vector<std::size_t>* exact_idx) {
  // merge equal energies
  std::vector<std::pair<double, Complex>> samples = samples_in;
  std::sort(samples.begin(), samples.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<double, Complex>> merged;
  std::vector<int> counts;
  for (const auto& s : samples) {
    if (!merged.empty() && std::abs(s.first - merged.back().first) <= 1e-12) {
      merged.back().second += s.second;
      counts.back() += 1;
    } else {
      merged.push_back(s);
      counts.push_back(1);
    }
  }
  for (std::size_t i = 0; i < merged.size(); ++i) merged[i].second /= double(counts[i]);
  if (merged.empty()) return;
  std::vector<double> xs;
  std::vector<Complex> ys;
  for (auto& m : merged) {
    xs.push_back(m.first);
    ys.push_back(m.second);
  }
  for (std::size_t i = 0; i < rpts.size(); ++i) {
    double r = rpts[i];
    // exact hit?
    bool exact = false;
    for (std::size_t q = 0; q < xs.size(); ++q)
      if (std::abs(xs[q] - r) <= 1e-12 * std::max(1.0, r)) {
        out[i] = ys[q];
        exact = true;
        break;
      }
    if (exact) {
      if (exact_idx) exact_idx->push_back(i);
      continue;
    }
    if (r <= xs.front()) {
      out[i] = ys.front();
      continue;
    }
    if (r >= xs.back()) {
      out[i] = ys.back();
      continue;
    }
    std::size_t hi = 1;
    while (xs[hi] < r) ++hi;
    double t = (r - xs[hi - 1]) / (xs[hi] - xs[hi - 1]);
    out[i] = (1.0 - t) * ys[hi - 1] + t * ys[hi];
  }
}

}  // namespace

KernelFamily extract_kernels(const FockOperator& h, const MomentumGrid& grid,
                             const ExtractOptions& opt, ExtractReport* report, double mu, int s,
                             double xi) {
  const BasisPtr& basis = h.basis;
  if (basis->particle_dim() != 1)
    throw std::invalid_argument("extraction requires a single particle level");
  if (!grid.same_as(basis->grid())) throw std::invalid_argument("grid mismatch");

  KernelFamily f;
  f.grid = grid;
  f.rgrid = RGrid::make_for(grid);
  f.mu = mu;
  f.s = s;
  f.xi = xi;
  f.w00.assign(f.rgrid.r.size(), Complex(0, 0));
  std::vector<double> rpts(f.rgrid.r.begin(), f.rgrid.r.begin() + f.rgrid.geom_count);

  ExtractReport rep;
  rep.exact_r_w00.resize(1);
  const int nk = grid.n_modes;
  const std::size_t fd = basis->fock_dim();

  struct Pending {
    int m, n;
    // per flat mode index, list of (r, value)
    std::vector<std::vector<std::pair<double, Complex>>> samples;
  };

  const std::pair<int, int> orders[5] = {{1, 0}, {0, 1}, {1, 1}, {2, 0}, {0, 2}};
  std::vector<Pending> pend;
  for (auto [m, n] : orders) {
    Pending p;
    p.m = m;
    p.n = n;
    std::size_t kc = 1;
    for (int i = 0; i < m + n; ++i) kc *= nk;
    p.samples.resize(kc);
    pend.push_back(std::move(p));
  }

  for (std::size_t oi = 0; oi < 5; ++oi) {
    auto [m, n] = orders[oi];
    for_each_transition(basis, m, n, [&](const Transition& t) {
      if (m == 1 && n == 1 && t.j1 == t.j2) return;  // diagonal gauge handled below
      double chi = CutoffProfile::chi_scaled(t.e_to, opt.scale) *
                   CutoffProfile::chi_scaled(t.e_from, opt.scale);
      std::size_t flat = (m + n == 1) ? std::size_t(t.j1) : std::size_t(t.j1) * nk + t.j2;
      if (chi < opt.chi_floor) {
        double el = std::abs(h.mat(t.to, t.from));
        if (el > 1e-14) rep.unsampled += 1;
        return;
      }
      Complex v = h.mat(t.to, t.from) / (chi * t.amp);
      pend[oi].samples[flat].emplace_back(t.r_arg, v);
      // second-order tuples are enumerated over one triangle only; mirror the
      // sample so the symmetric kernel is filled on both
      if (m + n == 2 && m != n && t.j1 != t.j2)
        pend[oi].samples[std::size_t(t.j2) * nk + t.j1].emplace_back(t.r_arg, v);
      rep.sampled += 1;
    });
  }

  // map interaction samples onto the kernel grids
  for (auto& p : pend) {
    bool any = false;
    for (auto& sv : p.samples)
      if (!sv.empty()) any = true;
    if (!any) continue;
    WickKernel k = WickKernel::zero(p.m, p.n, rpts, nk, grid.sigma);
    for (std::size_t flat = 0; flat < p.samples.size(); ++flat) {
      auto& sv = p.samples[flat];
      if (sv.empty()) continue;
      // spread across equivalent samples
      std::sort(sv.begin(), sv.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      for (std::size_t q = 1; q < sv.size(); ++q)
        if (std::abs(sv[q].first - sv[q - 1].first) <= 1e-12)
          rep.max_sample_spread =
              std::max(rep.max_sample_spread, std::abs(sv[q].second - sv[q - 1].second));
      std::vector<Complex> col(rpts.size(), Complex(0, 0));
      onto_grid(sv, rpts, col, nullptr);
      for (std::size_t ir = 0; ir < rpts.size(); ++ir) k.values[ir * k.k_count() + flat] = col[ir];
    }
    k.symmetrize();
    f.kernels.push_back(std::move(k));
  }

  // gauge convention: same-mode w11 diagonal from adjacent off-diagonal samples
  if (WickKernel* w11 = f.kernel(1, 1)) {
    for (std::size_t ir = 0; ir < w11->r.size(); ++ir)
      for (int q = 0; q < nk; ++q) {
        Complex v;
        if (q == 0)
          v = w11->at(ir, 0, 1);
        else if (q == nk - 1)
          v = w11->at(ir, nk - 1, nk - 2);
        else
          v = 0.5 * (w11->at(ir, q, q - 1) + w11->at(ir, q, q + 1));
        w11->at(ir, q, q) = v;
        rep.diag_gauge_residual = std::max(rep.diag_gauge_residual, std::abs(v));
      }
  }

  // w00 from the cleaned diagonal
  {
    std::vector<std::pair<double, Complex>> samples;
    const WickKernel* w11 = f.kernel(1, 1);
    const auto& g = grid;
    for (std::size_t fidx = 0; fidx < fd; ++fidx) {
      double es = basis->field_energy(fidx);
      Complex diag = h.mat(fidx, fidx);
      if (w11) {
        double chi2 = CutoffProfile::chi_scaled(es, opt.scale);
        chi2 *= chi2;
        if (chi2 > 0.0) {
          const auto& occ = basis->occ(fidx);
          for (int i = 0; i < nk; ++i) {
            if (occ[i] == 0) continue;
            diag -= chi2 * double(occ[i]) * (g.w[i] / g.k[i]) * w11->eval(es - g.k[i], i, i);
          }
        }
      }
      samples.emplace_back(es, diag);
    }
    // grid targets: geometric points plus the extension points
    std::vector<Complex> out(f.rgrid.r.size(), Complex(0, 0));
    onto_grid(samples, f.rgrid.r, out, &rep.exact_r_w00[0]);
    f.w00 = std::move(out);
  }

  f.drop_zero_kernels(0.0);
  if (report) *report = rep;
  return f;
}

WickBoundReport wick_bound_check(const WickKernel& k, double mu, double rho,
                                 const BasisPtr& basis) {
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in (0,1]");
  WickBoundReport r;
  FockOperator w = assemble_monomial(k, basis);
  const std::size_t dim = basis->dim();

  VecC weight_m(dim), weight_n(dim), chi(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    double e = basis->field_energy(basis->fock_of(i));
    weight_m[i] = std::pow(e + rho, -0.5 * k.m);
    weight_n[i] = std::pow(e + rho, -0.5 * k.n);
    chi[i] = CutoffProfile::chi_scaled(e, rho);
  }
  MatC weighted = weight_m.asDiagonal() * w.mat * weight_n.asDiagonal();
  MatC cut = chi.asDiagonal() * w.mat * chi.asDiagonal();
  Eigen::BDCSVD<MatC> svd1(weighted);
  Eigen::BDCSVD<MatC> svd2(cut);
  r.lhs_weighted = svd1.singularValues().size() ? svd1.singularValues()(0) : 0.0;
  r.lhs_cut = svd2.singularValues().size() ? svd2.singularValues()(0) : 0.0;
  r.rhs_weighted = kernel_norm_mu(k, 0.0);
  double fact = 1.0;
  for (int i = 2; i <= k.m; ++i) fact *= i;
  for (int i = 2; i <= k.n; ++i) fact *= i;
  r.rhs_cut = std::pow(rho, (k.m + k.n) * (1.0 + mu)) / std::sqrt(fact) * kernel_norm_mu(k, mu);
  return r;
}

}  // namespace srg
