#include "srg/verify.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "srg/assemble.hpp"
#include "srg/cutoff.hpp"

namespace srg {

namespace {

double op_norm(const MatC& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::BDCSVD<MatC> svd(m);
  return svd.singularValues()(0);
}

// least-squares Hoelder exponent from log-differences over all pairs with
// |x_i - x_j| >= 2 grid steps
double holder_fit(const std::vector<double>& xs, const std::vector<double>& vals) {
  if (xs.size() < 4) return 0.0;
  double step = (xs.back() - xs.front()) / double(xs.size() - 1);
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      double dx = std::abs(xs[j] - xs[i]);
      if (dx < 2.0 * step - 1e-15) continue;
      double dv = std::abs(vals[j] - vals[i]);
      if (dv < 1e-13) continue;
      lx.push_back(std::log(dx));
      ly.push_back(std::log(dv));
    }
  if (lx.size() < 3) return 1.0;  // flat scan: no measurable modulus
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= lx.size();
  my /= ly.size();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace

EigenSystem exact_diag(const FockOperator& h) {
  if (!h.hermitian && h.hermiticity_defect() > 1e-12)
    throw std::invalid_argument("exact_diag requires a hermitian operator");
  Eigen::SelfAdjointEigenSolver<MatC> es(h.mat);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  EigenSystem out;
  out.values = es.eigenvalues();
  out.vectors = es.eigenvectors();
  double scale = std::max(1e-300, op_norm(h.mat));
  for (Eigen::Index i = 0; i < out.values.size(); ++i) {
    double res = (h.mat * out.vectors.col(i) - out.values[i] * out.vectors.col(i)).norm();
    out.max_residual = std::max(out.max_residual, res / scale);
  }
  return out;
}

double weighted_resolvent(const FockOperator& h, const FockOperator& b_theta, double lambda,
                          double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  h.assert_same_basis(b_theta);
  MatC shifted = h.mat;
  shifted.diagonal().array() -= Complex(lambda, eps);
  MatC solved = shifted.partialPivLu().solve(b_theta.mat);
  return op_norm(b_theta.mat * solved);
}

std::string ScanTable::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "x,eps,value\n";
  for (const auto& r : rows) os << r.x << ',' << r.eps << ',' << r.value << '\n';
  return os.str();
}

std::string ScanTable::to_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"kind\":\"" << kind << "\",\"theta\":" << theta << ",\"nu_fit\":" << nu_fit
     << ",\"window\":[" << window_lo << ',' << window_hi << "],\"rows\":[";
  for (std::size_t i = 0; i < rows.size(); ++i)
    os << (i ? "," : "") << '[' << rows[i].x << ',' << rows[i].eps << ',' << rows[i].value << ']';
  os << "]}";
  return os.str();
}

double local_eps_floor(const VecD& eigenvalues, double lo, double hi) {
  std::vector<double> in;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i)
    if (eigenvalues[i] >= lo && eigenvalues[i] <= hi) in.push_back(eigenvalues[i]);
  if (in.size() < 2) return 0.25 * (hi - lo);
  double mean_gap = (in.back() - in.front()) / double(in.size() - 1);
  return 2.0 * mean_gap;
}

LapScanResult lap_scan(const FockOperator& h, const FockOperator& b_theta, double theta,
                       double window_lo, double window_hi, int n_lambda, double eps_floor) {
  if (!(theta > 0.5)) throw std::invalid_argument("theta must exceed 1/2");
  LapScanResult res;
  res.eps_floor = eps_floor;
  res.table.theta = theta;
  res.table.kind = "lap";
  res.table.window_lo = window_lo;
  res.table.window_hi = window_hi;

  std::vector<double> xs, vals;
  double sup_floor = 0.0, sup_8 = 0.0;
  for (int i = 0; i < n_lambda; ++i) {
    double lam = window_lo + (window_hi - window_lo) * (n_lambda == 1 ? 0.5 : double(i) / (n_lambda - 1));
    double v_floor = weighted_resolvent(h, b_theta, lam, eps_floor);
    double v_8 = weighted_resolvent(h, b_theta, lam, 8.0 * eps_floor);
    res.table.rows.push_back({lam, eps_floor, v_floor});
    xs.push_back(lam);
    vals.push_back(v_floor);
    sup_floor = std::max(sup_floor, v_floor);
    sup_8 = std::max(sup_8, v_8);
  }
  res.sup_at_floor = sup_floor;
  res.sup_at_8floor = sup_8;
  res.growth = sup_8 > 0.0 ? sup_floor / sup_8 - 1.0 : 0.0;
  res.holder_exponent = holder_fit(xs, vals);
  res.table.nu_fit = res.holder_exponent;
  return res;
}

DecayScanResult decay_scan(const FockOperator& h, const FockOperator& b_theta, double f_lo,
                           double f_hi, int n_times) {
  DecayScanResult res;
  res.table.kind = "decay";
  res.table.window_lo = f_lo;
  res.table.window_hi = f_hi;

  EigenSystem es = exact_diag(h);
  // smooth bump on (f_lo, f_hi)
  auto bump = [&](double e) {
    double t = (2.0 * e - (f_lo + f_hi)) / (f_hi - f_lo);
    if (std::abs(t) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - t * t));
  };
  VecD f(es.values.size());
  std::vector<double> covered;
  for (Eigen::Index i = 0; i < es.values.size(); ++i) {
    f[i] = bump(es.values[i]);
    if (f[i] > 1e-12) covered.push_back(es.values[i]);
  }
  res.levels_in_support = static_cast<int>(covered.size());
  if (covered.empty()) throw std::invalid_argument("no eigenvalues under the bump support");
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < covered.size(); ++i)
    min_gap = std::min(min_gap, covered[i] - covered[i - 1]);
  if (!std::isfinite(min_gap) || min_gap <= 0.0) min_gap = f_hi - f_lo;
  res.t_rec = 2.0 * 3.141592653589793 / min_gap;

  MatC p = b_theta.mat * es.vectors;  // columns weighted
  auto norm_at = [&](double t) {
    VecC phase(es.values.size());
    for (Eigen::Index i = 0; i < es.values.size(); ++i)
      phase[i] = std::polar(f[i], -es.values[i] * t);
    MatC m = p * phase.asDiagonal() * p.adjoint();
    return op_norm(m);
  };

  res.t0_value = norm_at(0.0);
  double t_max = 0.5 * res.t_rec;
  int decreasing = 0;
  double prev = res.t0_value;
  std::vector<double> ts, vs;
  for (int i = 1; i <= n_times; ++i) {
    double t = t_max * double(i) / n_times;
    double v = norm_at(t);
    res.table.rows.push_back({t, 0.0, v});
    ts.push_back(t);
    vs.push_back(v);
    if (v < prev) ++decreasing;
    prev = v;
  }
  res.monotone_fraction = ts.empty() ? 0.0 : double(decreasing) / double(ts.size());
  res.final_ratio = vs.empty() ? 1.0 : vs.back() / res.t0_value;

  // power-law fit over the scan (descriptive only on a discrete spectrum)
  std::vector<double> lt, lv;
  for (std::size_t i = 0; i < ts.size(); ++i)
    if (vs[i] > 1e-300) {
      lt.push_back(std::log(ts[i]));
      lv.push_back(std::log(vs[i]));
    }
  if (lt.size() >= 3) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lt.size(); ++i) {
      mx += lt[i];
      my += lv[i];
    }
    mx /= lt.size();
    my /= lv.size();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < lt.size(); ++i) {
      num += (lt[i] - mx) * (lv[i] - my);
      den += (lt[i] - mx) * (lt[i] - mx);
    }
    res.nu_fit = den > 0.0 ? -num / den : 0.0;
  }
  res.table.nu_fit = res.nu_fit;
  return res;
}

std::string MourreReport::to_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"delta\":" << delta << ",\"min_eig_restricted\":" << min_eig_restricted
     << ",\"min_eig_full\":" << min_eig_full << ",\"threshold\":" << threshold
     << ",\"w_tilde_defect\":" << w_tilde_defect << ",\"gamma\":" << gamma
     << ",\"implied_c\":" << implied_c << ",\"window_dim\":" << window_dim << "}";
  return os.str();
}

MourreReport mourre_check(const KernelFamily& fam, const BasisPtr& basis, const FockOperator& b,
                          double delta) {
  MourreReport rep;
  rep.delta = delta;
  rep.threshold = -0.05 * delta;

  FockOperator h = assemble_hamiltonian(fam, basis, 1.0);
  Complex e_const = fam.w00_at(0.0);
  MatC h1 = h.mat;
  h1.diagonal().array() -= e_const;
  if ((h1 - h1.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, h1.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("mourre_check needs a self-adjoint family");
  h1 = 0.5 * (h1 + h1.adjoint()).eval();

  // T~ = T'(H_f) H_f via the profile derivative; W~ = i[W, B]
  MatC t_tilde = MatC::Zero(basis->dim(), basis->dim());
  for (std::size_t i = 0; i < basis->dim(); ++i) {
    double e = basis->field_energy(basis->fock_of(i));
    t_tilde(i, i) = fam.w00_derivative(e).real() * e;
  }
  MatC w = h.mat;
  for (std::size_t i = 0; i < basis->dim(); ++i)
    w(i, i) -= fam.w00_at(basis->field_energy(basis->fock_of(i)));
  const Complex I(0, 1);
  MatC w_tilde = I * (w * b.mat - b.mat * w);
  MatC commutator = t_tilde + 0.5 * (w_tilde + w_tilde.adjoint());

  Eigen::SelfAdjointEigenSolver<MatC> es(h1);
  std::vector<Eigen::Index> window;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()[i] > 0.5 * delta) window.push_back(i);
  rep.window_dim = window.size();

  rep.w_tilde_defect = op_norm(0.5 * (w_tilde + w_tilde.adjoint()) - 0.5 * w);
  rep.gamma = interaction_norm_xi(fam, fam.mu, fam.s, fam.xi);
  rep.implied_c = rep.gamma > 0.0 ? rep.w_tilde_defect / rep.gamma : 0.0;

  if (window.empty()) {
    rep.min_eig_restricted = 0.0;
    rep.min_eig_full = 0.0;
    return rep;
  }
  MatC v(basis->dim(), window.size());
  for (std::size_t c = 0; c < window.size(); ++c) v.col(c) = es.eigenvectors().col(window[c]);
  MatC compressed = v.adjoint() * commutator * v;
  compressed -= 0.25 * delta * MatC::Identity(window.size(), window.size());
  Eigen::SelfAdjointEigenSolver<MatC> es2(0.5 * (compressed + compressed.adjoint()));
  rep.min_eig_restricted = es2.eigenvalues()(0);
  rep.min_eig_full = std::min(0.0, rep.min_eig_restricted);
  return rep;
}

bool WindowSchedule::covers(double lo, double hi) const {
  // union of closed intervals must cover [lo, hi]
  std::vector<std::pair<double, double>> iv;
  for (const auto& w : windows) iv.emplace_back(w.lo, w.hi);
  std::sort(iv.begin(), iv.end());
  double reach = lo;
  for (const auto& [a, b] : iv) {
    if (a > reach + 1e-15) return false;
    reach = std::max(reach, b);
    if (reach >= hi - 1e-15) return true;
  }
  return reach >= hi - 1e-15;
}

std::string WindowSchedule::to_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"e_g\":" << e_g << ",\"rho\":" << rho << ",\"rho0\":" << rho0 << ",\"windows\":[";
  for (std::size_t i = 0; i < windows.size(); ++i)
    os << (i ? "," : "") << '[' << windows[i].lo << ',' << windows[i].hi << ']';
  os << "]}";
  return os.str();
}

WindowSchedule window_schedule(double e_g, double rho, double rho0, int n_max) {
  if (!(rho > 0.0 && rho <= 0.5)) throw std::invalid_argument("rho must lie in (0, 1/2]");
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  WindowSchedule ws;
  ws.e_g = e_g;
  ws.rho = rho;
  ws.rho0 = rho0;
  for (int n = 0; n <= n_max; ++n) {
    double delta_n = std::pow(rho, n) / 18.0;
    WindowSchedule::Window w;
    w.delta_n = delta_n;
    w.lo = e_g + rho0 * 0.5 * rho * delta_n;
    w.hi = e_g + rho0 * delta_n;
    ws.windows.push_back(w);
  }
  // for rho <= 1/2 consecutive windows always overlap: rho delta_n / 2 < delta_{n+1}
  double cover_lo = ws.windows.back().lo;
  double cover_hi = ws.windows.front().hi;
  if (!ws.covers(cover_lo, cover_hi))
    throw std::runtime_error("window schedule has a coverage gap");
  return ws;
}

std::string LapTransferCheck::to_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"holder_decimated\":" << holder_decimated << ",\"holder_original\":" << holder_original
     << ",\"sup_decimated\":" << sup_decimated << ",\"sup_original\":" << sup_original
     << ",\"ratio\":" << ratio << "}";
  return os.str();
}

LapTransferCheck lap_transfer_check(const std::vector<FockOperator>& h_family,
                                    const std::vector<FockOperator>& h0_family,
                                    const std::vector<double>& lambdas, const Partition& part,
                                    const FockOperator& b_theta, double eps_floor) {
  if (h_family.size() != h0_family.size() || h_family.size() != lambdas.size())
    throw std::invalid_argument("family sizes mismatch");
  LapTransferCheck out;
  std::vector<double> vals_f, vals_h;
  for (std::size_t i = 0; i < h_family.size(); ++i) {
    FeshbachResult fr = feshbach_map(h_family[i], h0_family[i], part);
    // weighted resolvent of the decimated operator at -i eps on its range
    MatC shifted = fr.f.mat;
    shifted.diagonal().array() -= Complex(0.0, eps_floor);
    MatC solved = shifted.partialPivLu().solve(b_theta.mat);
    vals_f.push_back(op_norm(b_theta.mat * solved));
    MatC sh = h_family[i].mat;
    sh.diagonal().array() -= Complex(0.0, eps_floor);
    MatC so = sh.partialPivLu().solve(b_theta.mat);
    vals_h.push_back(op_norm(b_theta.mat * so));
  }
  out.holder_decimated = holder_fit(lambdas, vals_f);
  out.holder_original = holder_fit(lambdas, vals_h);
  out.sup_decimated = *std::max_element(vals_f.begin(), vals_f.end());
  out.sup_original = *std::max_element(vals_h.begin(), vals_h.end());
  out.ratio = out.sup_decimated > 0.0 ? out.sup_original / out.sup_decimated : 0.0;
  return out;
}

}  // namespace srg
