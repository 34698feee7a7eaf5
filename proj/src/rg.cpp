#include "srg/rg.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "srg/cutoff.hpp"

namespace srg {

int grid_power(double rho, double sigma) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in (0,1)");
  double p = std::log(rho) / std::log(sigma);
  int pi = static_cast<int>(std::lround(p));
  if (pi < 1 || std::abs(p - pi) > 1e-10)
    throw std::invalid_argument("rho must be an integer power of sigma");
  return pi;
}

PolydiscParams polydisc_membership(const KernelFamily& f) {
  return polydisc_membership(f, f.xi, f.s);
}

PolydiscParams polydisc_membership(const KernelFamily& f, double xi_override, int s_override) {
  PolydiscParams p;
  p.mu = f.mu;
  p.s = s_override;
  p.xi = xi_override;
  p.alpha = std::abs(f.w00_at(0.0));
  auto d1 = derivative_r(f.rgrid.r, f.w00);
  double beta = 0.0;
  for (std::size_t i = 0; i < d1.size(); ++i)
    beta = std::max(beta, std::abs(d1[i] - Complex(1.0, 0.0)));
  p.beta = beta;
  p.gamma = interaction_norm_xi(f, f.mu, s_override, xi_override);
  if (!std::isfinite(p.gamma)) throw std::runtime_error("non-finite interaction norm");
  return p;
}

namespace {

int exact_r_index(const std::vector<double>& r, double x) {
  for (std::size_t i = 0; i < r.size(); ++i)
    if (std::abs(r[i] - x) <= 1e-12 * std::max(1.0, std::abs(x))) return static_cast<int>(i);
  return -1;
}

Complex kernel_value_at(const WickKernel& k, double r_scaled, int j1, int j2) {
  int ir = exact_r_index(k.r, r_scaled);
  if (ir >= 0) return (k.order() == 1) ? k.at(ir, j1) : k.at(ir, j1, j2);
  return (k.order() == 1) ? k.eval(r_scaled, j1) : k.eval(r_scaled, j1, j2);
}

}  // namespace

KernelFamily scale_kernels(const KernelFamily& f, double rho) {
  const int p = grid_power(rho, f.grid.sigma);
  KernelFamily out;
  out.grid = f.grid;
  out.rgrid = f.rgrid;
  out.mu = f.mu;
  out.s = f.s;
  out.xi = f.xi;

  // w00: rho^-1 w00(rho r); geometric points relabel exactly
  out.w00.assign(f.rgrid.r.size(), Complex(0, 0));
  std::vector<double> re(f.w00.size()), im(f.w00.size());
  for (std::size_t i = 0; i < f.w00.size(); ++i) {
    re[i] = f.w00[i].real();
    im[i] = f.w00[i].imag();
  }
  for (std::size_t i = 0; i < f.rgrid.r.size(); ++i) {
    double target = rho * f.rgrid.r[i];
    int ex = f.rgrid.exact_index(target);
    Complex v = (ex >= 0) ? f.w00[ex]
                          : Complex(interp_linear(f.rgrid.r, re, target),
                                    interp_linear(f.rgrid.r, im, target));
    out.w00[i] = v / rho;
  }

  const double sig = f.grid.sigma;
  for (const auto& k : f.kernels) {
    WickKernel nk = WickKernel::zero(k.m, k.n, k.r, k.n_modes, k.sigma);
    const double pref = std::pow(rho, k.order() - 1);
    for (std::size_t ir = 0; ir < k.r.size(); ++ir) {
      double rs = rho * k.r[ir];
      for (int j1 = 0; j1 < k.n_modes; ++j1) {
        // mode shift: rho k_j = k_{j-p}; below the grid use the |k|^mu tail
        int a = j1 - p;
        double fac1 = 1.0;
        if (a < 0) {
          fac1 = std::pow(sig, f.mu * static_cast<double>(-a));
          a = 0;
        }
        if (k.order() == 1) {
          nk.at(ir, j1) = pref * fac1 * kernel_value_at(k, rs, a, -1);
        } else {
          for (int j2 = 0; j2 < k.n_modes; ++j2) {
            int b = j2 - p;
            double fac2 = 1.0;
            if (b < 0) {
              fac2 = std::pow(sig, f.mu * static_cast<double>(-b));
              b = 0;
            }
            nk.at(ir, j1, j2) = pref * fac1 * fac2 * kernel_value_at(k, rs, a, b);
          }
        }
      }
    }
    out.kernels.push_back(std::move(nk));
  }
  return out;
}

RgStepResult rg_step(const KernelFamily& f, double rho, const BasisPtr& basis,
                     double margin_floor) {
  grid_power(rho, f.grid.sigma);  // validates
  if (basis->particle_dim() != 1)
    throw std::invalid_argument("flow basis must have a single particle level");

  FockOperator h = assemble_hamiltonian(f, basis, 1.0);
  MatC h0m = MatC::Zero(basis->dim(), basis->dim());
  for (std::size_t i = 0; i < basis->dim(); ++i)
    h0m(i, i) = f.w00_at(basis->field_energy(basis->fock_of(i)));
  FockOperator h0(basis, std::move(h0m), false);

  Partition part = Partition::energy_cutoff(basis, rho);
  FeshbachResult fr = feshbach_map(h, h0, part, margin_floor);

  Complex h_vac = h.mat(0, 0);  // vacuum expectation = w00(0)
  Complex e_shift = h_vac / rho;

  ExtractOptions eo;
  eo.scale = rho;
  RgStepResult res;
  res.family = [&] {
    KernelFamily g = extract_kernels(fr.f, f.grid, eo, &res.extract, f.mu, f.s, f.xi);
    return scale_kernels(g, rho);
  }();
  for (auto& v : res.family.w00) v -= e_shift;
  res.e_shift = e_shift;
  res.margin = fr.invertibility_margin;
  return res;
}

RGTrace rg_iterate(const KernelFamily& f0, double rho, int n_steps, const BasisPtr& basis,
                   double escape_threshold, double margin_floor) {
  if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
  static const CutoffProfile profile = CutoffProfile::make();

  RGTrace tr;
  tr.rho = rho;
  tr.c_chi = profile.c_chi;
  tr.xi_audit = std::sqrt(rho) / (4.0 * profile.c_chi);
  tr.escape_threshold = escape_threshold;
  tr.initial = polydisc_membership(f0);
  tr.initial_gamma_audit = interaction_norm_xi(f0, f0.mu, 1, tr.xi_audit);
  tr.snapshot_r = f0.rgrid.r;
  tr.w00_snapshots.push_back(f0.w00);

  KernelFamily cur = f0;
  double gamma_audit_prev = tr.initial_gamma_audit;
  double beta_prev = tr.initial.beta;
  Complex accum(0.0, 0.0);  // sum_k rho^(k-n) * shift_k
  for (int step = 1; step <= n_steps; ++step) {
    Complex e_cum = cur.w00_at(0.0) + accum;
    if (std::abs(e_cum) > escape_threshold) {
      tr.status = FlowStatus::escaped;
      tr.stop_step = step;
      tr.escape_sign = (e_cum.real() >= 0.0) ? 1 : -1;
      return tr;
    }
    RGTraceRow row;
    row.step = step;
    row.alpha_pred = 3.0 * tr.c_chi * gamma_audit_prev * gamma_audit_prev / (2.0 * rho);
    row.beta_pred = beta_prev + row.alpha_pred;
    row.gamma_pred = 128.0 * tr.c_chi * tr.c_chi * std::pow(rho, cur.mu) * gamma_audit_prev;
    try {
      RgStepResult sr = rg_step(cur, rho, basis, margin_floor);
      cur = std::move(sr.family);
      row.e_shift = sr.e_shift;
      row.margin = sr.margin;
    } catch (const NotInvertible& e) {
      tr.status = FlowStatus::not_invertible;
      tr.stop_step = step;
      return tr;
    }
    accum = accum / rho + row.e_shift;
    row.unstable = cur.w00_at(0.0);
    row.cumulative = row.unstable + accum;
    PolydiscParams pd = polydisc_membership(cur);
    row.alpha = pd.alpha;
    row.beta = pd.beta;
    row.gamma = pd.gamma;
    row.gamma_audit = interaction_norm_xi(cur, cur.mu, 1, tr.xi_audit);
    tr.rows.push_back(row);
    tr.w00_snapshots.push_back(cur.w00);
    gamma_audit_prev = row.gamma_audit;
    beta_prev = row.beta;
  }
  tr.status = FlowStatus::completed;
  return tr;
}

std::string RGTrace::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "step,e_shift_re,e_shift_im,unstable_re,unstable_im,cumulative_re,cumulative_im,"
        "alpha,beta,gamma,gamma_audit,alpha_pred,beta_pred,gamma_pred,margin,status\n";
  for (const auto& r : rows) {
    const char* st = "ok";
    if (status != FlowStatus::completed && r.step == stop_step)
      st = (status == FlowStatus::escaped) ? "escaped" : "not_invertible";
    os << r.step << ',' << r.e_shift.real() << ',' << r.e_shift.imag() << ','
       << r.unstable.real() << ',' << r.unstable.imag() << ',' << r.cumulative.real() << ','
       << r.cumulative.imag() << ',' << r.alpha << ',' << r.beta << ',' << r.gamma << ','
       << r.gamma_audit << ',' << r.alpha_pred << ',' << r.beta_pred << ',' << r.gamma_pred << ','
       << r.margin << ',' << st << '\n';
  }
  return os.str();
}

std::string RGTrace::to_json() const {
  std::ostringstream os;
  os.precision(17);
  const char* st = status == FlowStatus::completed
                       ? "completed"
                       : (status == FlowStatus::escaped ? "escaped" : "not_invertible");
  os << "{\"rho\":" << rho << ",\"rho0\":" << rho0 << ",\"lambda\":" << lambda
     << ",\"c_chi\":" << c_chi << ",\"xi_audit\":" << xi_audit << ",\"status\":\"" << st
     << "\",\"stop_step\":" << stop_step << ",\"escape_sign\":" << escape_sign
     << ",\"initial\":{\"alpha\":" << initial.alpha << ",\"beta\":" << initial.beta
     << ",\"gamma\":" << initial.gamma << ",\"gamma_audit\":" << initial_gamma_audit << "},"
     << "\"rows\":[";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    os << (i ? "," : "") << "{\"step\":" << r.step << ",\"e_shift\":[" << r.e_shift.real() << ','
       << r.e_shift.imag() << "],\"unstable\":[" << r.unstable.real() << ',' << r.unstable.imag()
       << "],\"cumulative\":[" << r.cumulative.real() << ',' << r.cumulative.imag()
       << "],\"alpha\":" << r.alpha << ",\"beta\":" << r.beta << ",\"gamma\":" << r.gamma
       << ",\"gamma_audit\":" << r.gamma_audit << ",\"alpha_pred\":" << r.alpha_pred
       << ",\"beta_pred\":" << r.beta_pred << ",\"gamma_pred\":" << r.gamma_pred
       << ",\"margin\":" << r.margin << "}";
  }
  os << "]}";
  return os.str();
}

ContractionAudit contraction_audit(const RGTrace& trace, double mu) {
  ContractionAudit a;
  a.rate_bound = 128.0 * trace.c_chi * trace.c_chi * std::pow(trace.rho, mu);
  if (trace.rows.size() < 2 && trace.rows.empty())
    throw std::invalid_argument("trace too short for an audit");

  double beta_prev = trace.initial.beta;
  double gamma_prev = trace.initial_gamma_audit;
  bool all_pass = true;
  for (const auto& r : trace.rows) {
    ContractionAuditRow row;
    row.step = r.step;
    row.alpha = r.alpha;
    row.dbeta = r.beta - beta_prev;
    row.gamma = r.gamma_audit;
    row.alpha_bound = 3.0 * trace.c_chi * gamma_prev * gamma_prev / (2.0 * trace.rho);
    row.dbeta_bound = row.alpha_bound;
    row.gamma_bound = a.rate_bound * gamma_prev;
    row.pass = r.alpha <= row.alpha_bound && row.dbeta <= row.dbeta_bound &&
               r.gamma_audit <= row.gamma_bound;
    all_pass = all_pass && row.pass;
    a.rows.push_back(row);
    beta_prev = r.beta;
    gamma_prev = r.gamma_audit;
  }
  // geometric fit of gamma_audit
  std::vector<double> logs;
  double g0 = trace.initial_gamma_audit;
  for (const auto& r : trace.rows)
    if (r.gamma_audit > 0.0 && g0 > 0.0) {
      logs.push_back(std::log(r.gamma_audit / g0));
      g0 = r.gamma_audit;
    }
  if (!logs.empty()) {
    double mean = 0.0;
    for (double v : logs) mean += v;
    a.fitted_rate = std::exp(mean / logs.size());
    a.implied_c = a.fitted_rate / std::pow(trace.rho, mu);
  }
  a.pass = all_pass && a.fitted_rate <= a.rate_bound;
  return a;
}

std::string ContractionAudit::to_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"fitted_rate\":" << fitted_rate << ",\"rate_bound\":" << rate_bound
     << ",\"implied_c\":" << implied_c << ",\"pass\":" << (pass ? "true" : "false")
     << ",\"rows\":[";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    os << (i ? "," : "") << "{\"step\":" << r.step << ",\"alpha\":" << r.alpha
       << ",\"dbeta\":" << r.dbeta << ",\"gamma\":" << r.gamma
       << ",\"alpha_bound\":" << r.alpha_bound << ",\"dbeta_bound\":" << r.dbeta_bound
       << ",\"gamma_bound\":" << r.gamma_bound << ",\"pass\":" << (r.pass ? "true" : "false")
       << "}";
  }
  os << "]}";
  return os.str();
}

BisectResult gs_energy_bisect(const std::function<KernelFamily(double)>& initial_family,
                              double lambda_lo, double lambda_hi, double rho, int n_steps,
                              double tol, const BasisPtr& basis) {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  auto sign_at = [&](double lam, RGTrace* out) -> int {
    KernelFamily f = initial_family(lam);
    RGTrace tr = rg_iterate(f, rho, n_steps, basis);
    tr.lambda = lam;
    if (out) *out = tr;
    if (tr.status == FlowStatus::escaped) return tr.escape_sign;
    if (tr.status == FlowStatus::not_invertible)
      throw NotInvertible(0.0);
    double u = tr.rows.empty() ? f.w00_at(0.0).real() : tr.rows.back().cumulative.real();
    return (u >= 0.0) ? 1 : -1;
  };

  BisectResult res;
  int s_lo = sign_at(lambda_lo, nullptr);
  int s_hi = sign_at(lambda_hi, nullptr);
  res.probes = 2;
  if (s_lo == s_hi)
    throw std::runtime_error("no escape-sign change across the bisection window");
  double lo = lambda_lo, hi = lambda_hi;
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    int s = sign_at(mid, nullptr);
    ++res.probes;
    if (s == s_lo)
      lo = mid;
    else
      hi = mid;
  }
  res.e_g = 0.5 * (lo + hi);
  res.bracket = hi - lo;
  sign_at(res.e_g, &res.trace);
  ++res.probes;
  return res;
}

ESeriesReport e_series_estimate(const RGTrace& trace) {
  ESeriesReport rep;
  double acc = 0.0;
  for (const auto& r : trace.rows) {
    double delta = r.unstable.real();  // Delta_i E equals the post-shift residual
    double term = std::pow(trace.rho, r.step) * delta;
    rep.terms.push_back(term);
    acc += term;
    rep.partial_sums.push_back(acc);
    rep.tail_envelope.push_back(2.0 * std::abs(term));
  }
  rep.estimate = acc;
  // diverging partial sums signal a spectral parameter outside the tube
  for (std::size_t i = 1; i < rep.terms.size(); ++i)
    if (std::abs(rep.terms[i]) > 4.0 * std::abs(rep.terms[i - 1]) &&
        std::abs(rep.terms[i]) > 1e-12)
      rep.converged = false;
  rep.estimate = acc;
  return rep;
}

}  // namespace srg
