#include "srg/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "json.hpp"

namespace srg {

std::size_t WickKernel::k_count() const {
  std::size_t c = 1;
  for (int i = 0; i < order(); ++i) c *= static_cast<std::size_t>(n_modes);
  return c;
}

std::size_t WickKernel::idx(std::size_t ir, int j1, int j2) const {
  if (order() == 1) return ir * k_count() + j1;
  return ir * k_count() + static_cast<std::size_t>(j1) * n_modes + j2;
}

Complex& WickKernel::at(std::size_t ir, int j1, int j2) { return values[idx(ir, j1, j2)]; }
Complex WickKernel::at(std::size_t ir, int j1, int j2) const { return values[idx(ir, j1, j2)]; }

Complex WickKernel::eval(double rr, int j1, int j2) const {
  if (r.empty()) return 0.0;
  if (rr <= r.front()) return at(0, j1, j2);
  if (rr >= r.back()) return at(r.size() - 1, j1, j2);
  std::size_t hi = 1;
  while (r[hi] < rr) ++hi;
  double t = (rr - r[hi - 1]) / (r[hi] - r[hi - 1]);
  return (1.0 - t) * at(hi - 1, j1, j2) + t * at(hi, j1, j2);
}

WickKernel WickKernel::zero(int m, int n, const std::vector<double>& rpts, int n_modes,
                            double sigma) {
  WickKernel k;
  k.m = m;
  k.n = n;
  k.r = rpts;
  k.n_modes = n_modes;
  k.sigma = sigma;
  k.values.assign(rpts.size() * k.k_count(), Complex(0.0, 0.0));
  return k;
}

std::vector<double> WickKernel::mode_points() const {
  std::vector<double> kpts(n_modes);
  for (int i = 0; i < n_modes; ++i) kpts[i] = std::pow(sigma, n_modes - 1 - i);
  if (n_modes > 0) kpts[n_modes - 1] = 1.0;
  return kpts;
}

void WickKernel::symmetrize() {
  if (!((m == 2 && n == 0) || (m == 0 && n == 2))) return;
  for (std::size_t ir = 0; ir < r.size(); ++ir)
    for (int a = 0; a < n_modes; ++a)
      for (int b = a + 1; b < n_modes; ++b) {
        Complex avg = 0.5 * (at(ir, a, b) + at(ir, b, a));
        at(ir, a, b) = avg;
        at(ir, b, a) = avg;
      }
}

Complex KernelFamily::w00_at(double rr) const {
  std::vector<double> re(w00.size()), im(w00.size());
  for (std::size_t i = 0; i < w00.size(); ++i) {
    re[i] = w00[i].real();
    im[i] = w00[i].imag();
  }
  return {interp_linear(rgrid.r, re, rr), interp_linear(rgrid.r, im, rr)};
}

Complex KernelFamily::w00_derivative(double rr) const {
  auto d = derivative_r(rgrid.r, w00);
  std::vector<double> re(d.size()), im(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    re[i] = d[i].real();
    im[i] = d[i].imag();
  }
  return {interp_linear(rgrid.r, re, rr), interp_linear(rgrid.r, im, rr)};
}

const WickKernel* KernelFamily::kernel(int m, int n) const {
  for (const auto& k : kernels)
    if (k.m == m && k.n == n) return &k;
  return nullptr;
}

WickKernel* KernelFamily::kernel(int m, int n) {
  for (auto& k : kernels)
    if (k.m == m && k.n == n) return &k;
  return nullptr;
}

WickKernel& KernelFamily::ensure_kernel(int m, int n) {
  if (auto* k = kernel(m, n)) return *k;
  std::vector<double> rpts(rgrid.r.begin(), rgrid.r.begin() + rgrid.geom_count);
  kernels.push_back(WickKernel::zero(m, n, rpts, grid.n_modes, grid.sigma));
  return kernels.back();
}

void KernelFamily::drop_zero_kernels(double floor) {
  kernels.erase(std::remove_if(kernels.begin(), kernels.end(),
                               [&](const WickKernel& k) {
                                 double mx = 0.0;
                                 for (const auto& v : k.values) mx = std::max(mx, std::abs(v));
                                 return mx <= floor;
                               }),
                kernels.end());
}

KernelFamily KernelFamily::free_field(const MomentumGrid& g, double mu, int s, double xi) {
  KernelFamily f;
  f.grid = g;
  f.rgrid = RGrid::make_for(g);
  f.w00.resize(f.rgrid.r.size());
  for (std::size_t i = 0; i < f.rgrid.r.size(); ++i) f.w00[i] = f.rgrid.r[i];
  f.mu = mu;
  f.s = s;
  f.xi = xi;
  return f;
}

namespace {

// non-uniform 3-point first derivative
std::vector<Complex> d1_nonuniform(const std::vector<double>& x, const std::vector<Complex>& v) {
  std::size_t n = x.size();
  std::vector<Complex> out(n, Complex(0, 0));
  if (n < 2) return out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0) {
      out[i] = (v[1] - v[0]) / (x[1] - x[0]);
    } else if (i == n - 1) {
      out[i] = (v[n - 1] - v[n - 2]) / (x[n - 1] - x[n - 2]);
    } else {
      double hm = x[i] - x[i - 1], hp = x[i + 1] - x[i];
      out[i] = (hm / (hp * (hm + hp))) * v[i + 1] + ((hp - hm) / (hp * hm)) * v[i] -
               (hp / (hm * (hm + hp))) * v[i - 1];
    }
  }
  return out;
}

std::vector<Complex> d2_nonuniform(const std::vector<double>& x, const std::vector<Complex>& v) {
  std::size_t n = x.size();
  std::vector<Complex> out(n, Complex(0, 0));
  if (n < 3) return out;
  auto interior = [&](std::size_t i) {
    double hm = x[i] - x[i - 1], hp = x[i + 1] - x[i];
    return 2.0 * (hm * v[i + 1] - (hm + hp) * v[i] + hp * v[i - 1]) / (hm * hp * (hm + hp));
  };
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = interior(i);
  out[0] = interior(1);
  out[n - 1] = interior(n - 2);
  return out;
}

std::vector<Complex> apply_k_derivative(const WickKernel& k, double hstep, int slot) {
  const int nk = k.n_modes;
  std::vector<Complex> out(k.values.size(), Complex(0, 0));
  auto get = [&](std::size_t ir, int a, int b = 0) { return k.values[k.idx(ir, a, b)]; };
  for (std::size_t ir = 0; ir < k.r.size(); ++ir) {
    if (k.order() == 1) {
      for (int j = 0; j < nk; ++j) {
        Complex d;
        if (j == 0)
          d = nk >= 3 ? (-3.0 * get(ir, 0) + 4.0 * get(ir, 1) - get(ir, 2)) / (2.0 * hstep)
                      : (get(ir, 1) - get(ir, 0)) / hstep;
        else if (j == nk - 1)
          d = nk >= 3
                  ? (3.0 * get(ir, nk - 1) - 4.0 * get(ir, nk - 2) + get(ir, nk - 3)) / (2.0 * hstep)
                  : (get(ir, nk - 1) - get(ir, nk - 2)) / hstep;
        else
          d = (get(ir, j + 1) - get(ir, j - 1)) / (2.0 * hstep);
        out[k.idx(ir, j)] = d;
      }
    } else {
      for (int a = 0; a < nk; ++a)
        for (int b = 0; b < nk; ++b) {
          int j = (slot == 0) ? a : b;
          auto pick = [&](int jj) { return (slot == 0) ? get(ir, jj, b) : get(ir, a, jj); };
          Complex d;
          if (j == 0)
            d = nk >= 3 ? (-3.0 * pick(0) + 4.0 * pick(1) - pick(2)) / (2.0 * hstep)
                        : (pick(1) - pick(0)) / hstep;
          else if (j == nk - 1)
            d = nk >= 3 ? (3.0 * pick(nk - 1) - 4.0 * pick(nk - 2) + pick(nk - 3)) / (2.0 * hstep)
                        : (pick(nk - 1) - pick(nk - 2)) / hstep;
          else
            d = (pick(j + 1) - pick(j - 1)) / (2.0 * hstep);
          out[k.idx(ir, a, b)] = d;
        }
    }
  }
  return out;
}

std::vector<Complex> apply_r_derivative(const WickKernel& k) {
  // derivatives live on the positive part of the r grid: the step from the
  // vacuum point r = 0 to the first resolvable energy carries photon-number
  // truncation scars, not a derivative of the continuum profile
  const std::size_t kc = k.k_count();
  std::vector<Complex> out(k.values.size());
  std::size_t start = (!k.r.empty() && k.r[0] == 0.0 && k.r.size() > 2) ? 1 : 0;
  std::vector<double> rsub(k.r.begin() + start, k.r.end());
  std::vector<Complex> column(rsub.size());
  for (std::size_t c = 0; c < kc; ++c) {
    for (std::size_t ir = 0; ir < rsub.size(); ++ir)
      column[ir] = k.values[(ir + start) * kc + c];
    auto d = d1_nonuniform(rsub, column);
    for (std::size_t ir = 0; ir < rsub.size(); ++ir) out[(ir + start) * kc + c] = d[ir];
    for (std::size_t ir = 0; ir < start; ++ir) out[ir * kc + c] = d[0];
  }
  return out;
}

double norm_mu_of_values(const WickKernel& shape, const std::vector<Complex>& vals, double mu,
                         const std::vector<double>& kpts) {
  // max over slots j of sup |k_j|^-mu |w|
  double best = 0.0;
  const int nk = shape.n_modes;
  const std::size_t kc = shape.k_count();
  for (std::size_t ir = 0; ir < shape.r.size(); ++ir)
    for (std::size_t c = 0; c < kc; ++c) {
      double a = std::abs(vals[ir * kc + c]);
      if (a == 0.0) continue;
      if (shape.order() == 1) {
        best = std::max(best, a * std::pow(kpts[c], -mu));
      } else {
        int j1 = static_cast<int>(c) / nk, j2 = static_cast<int>(c) % nk;
        double f = std::max(std::pow(kpts[j1], -mu), std::pow(kpts[j2], -mu));
        best = std::max(best, a * f);
      }
    }
  return best;
}

}  // namespace

double kernel_norm_mu(const WickKernel& k, double mu) {
  return norm_mu_of_values(k, k.values, mu, k.mode_points());
}

double kernel_norm_mu_s(const WickKernel& k, double mu, int s) {
  if (s < 0 || s > 2) throw std::invalid_argument("smoothness index s must be 0, 1 or 2");
  std::vector<double> kpts = k.mode_points();
  const double h = std::log(1.0 / k.sigma);

  // enumerate (a, q) with a + |q| <= s, a = r-derivative order
  double total = 0.0;
  const int slots = k.order();
  auto value_of = [&](int a, const std::vector<int>& q) {
    WickKernel tmp = k;
    for (int slot = 0; slot < slots; ++slot)
      for (int rep = 0; rep < q[slot]; ++rep) tmp.values = apply_k_derivative(tmp, h, slot);
    for (int rep = 0; rep < a; ++rep) tmp.values = apply_r_derivative(tmp);
    return norm_mu_of_values(k, tmp.values, mu, kpts);
  };
  std::vector<int> q(slots, 0);
  std::function<void(int, int)> loop = [&](int slot, int budget) {
    if (slot == slots) {
      int used = 0;
      for (int v : q) used += v;
      for (int a = 0; a + used <= s; ++a) total += value_of(a, q);
      return;
    }
    for (int v = 0; v <= budget; ++v) {
      q[slot] = v;
      loop(slot + 1, budget - v);
    }
    q[slot] = 0;
  };
  loop(0, s);
  return total;
}

double w00_norm(const KernelFamily& f, int s) {
  double total = std::abs(f.w00_at(0.0));
  if (s >= 1) {
    auto d1 = derivative_r(f.rgrid.r, f.w00);
    double sup = 0.0;
    for (std::size_t i = 0; i < f.rgrid.r.size(); ++i)
      if (f.rgrid.r[i] <= 1.0 + 1e-14) sup = std::max(sup, std::abs(d1[i]));
    total += sup;
    if (s >= 2) {
      auto d2 = derivative_r2(f.rgrid.r, f.w00);
      double sup2 = 0.0;
      for (std::size_t i = 0; i < f.rgrid.r.size(); ++i)
        if (f.rgrid.r[i] <= 1.0 + 1e-14) sup2 = std::max(sup2, std::abs(d2[i]));
      total += sup2;
    }
  }
  return total;
}

double family_norm_xi(const KernelFamily& f, double mu, int s, double xi) {
  double total = w00_norm(f, s);
  for (const auto& k : f.kernels)
    total += std::pow(xi, -k.order()) * kernel_norm_mu_s(k, mu, s);
  return total;
}

double interaction_norm_xi(const KernelFamily& f, double mu, int s, double xi) {
  double total = 0.0;
  for (const auto& k : f.kernels)
    total += std::pow(xi, -k.order()) * kernel_norm_mu_s(k, mu, s);
  return total;
}

double kernel_norm(const KernelFamily& f, NormVariant v) {
  switch (v) {
    case NormVariant::w00:
      return w00_norm(f, f.s);
    case NormVariant::family_xi:
      return family_norm_xi(f, f.mu, f.s, f.xi);
    case NormVariant::mu: {
      double total = 0.0;
      for (const auto& k : f.kernels) total = std::max(total, kernel_norm_mu(k, f.mu));
      return total;
    }
    case NormVariant::mu_s: {
      double total = 0.0;
      for (const auto& k : f.kernels) total = std::max(total, kernel_norm_mu_s(k, f.mu, f.s));
      return total;
    }
  }
  return 0.0;
}

std::vector<Complex> derivative_r(const std::vector<double>& r, const std::vector<Complex>& v) {
  return d1_nonuniform(r, v);
}

std::vector<Complex> derivative_r2(const std::vector<double>& r, const std::vector<Complex>& v) {
  return d2_nonuniform(r, v);
}

// ---------------------------------------------------------------------------
// JSON serialization

using nlohmann::json;

namespace {

json complex_array(const std::vector<Complex>& v) {
  json a = json::array();
  for (const auto& c : v) a.push_back({c.real(), c.imag()});
  return a;
}

std::vector<Complex> complex_array_from(const json& a) {
  std::vector<Complex> v;
  v.reserve(a.size());
  for (const auto& e : a) v.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
  return v;
}

}  // namespace

std::string family_to_json(const KernelFamily& f) {
  json j;
  j["grid"] = {{"sigma", f.grid.sigma}, {"n_modes", f.grid.n_modes}};
  j["rgrid"] = {{"sigma", f.rgrid.sigma}, {"m_min", f.rgrid.m_min}};
  j["params"] = {{"mu", f.mu}, {"s", f.s}, {"xi", f.xi}};
  j["w00"] = complex_array(f.w00);
  json ks = json::array();
  for (const auto& k : f.kernels) {
    json e;
    e["m"] = k.m;
    e["n"] = k.n;
    e["values"] = complex_array(k.values);
    ks.push_back(e);
  }
  j["kernels"] = ks;
  return j.dump();
}

KernelFamily family_from_json(const std::string& text) {
  json j = json::parse(text);
  KernelFamily f;
  f.grid = MomentumGrid::make(j["grid"]["sigma"].get<double>(), j["grid"]["n_modes"].get<int>());
  f.rgrid = RGrid::make(j["rgrid"]["sigma"].get<double>(), j["rgrid"]["m_min"].get<int>());
  f.mu = j["params"]["mu"].get<double>();
  f.s = j["params"]["s"].get<int>();
  f.xi = j["params"]["xi"].get<double>();
  f.w00 = complex_array_from(j["w00"]);
  if (f.w00.size() != f.rgrid.r.size()) throw std::runtime_error("w00 length mismatch");
  std::vector<double> rpts(f.rgrid.r.begin(), f.rgrid.r.begin() + f.rgrid.geom_count);
  for (const auto& e : j["kernels"]) {
    WickKernel k = WickKernel::zero(e["m"].get<int>(), e["n"].get<int>(), rpts,
                                    f.grid.n_modes, f.grid.sigma);
    k.values = complex_array_from(e["values"]);
    if (k.values.size() != k.r.size() * k.k_count())
      throw std::runtime_error("kernel length mismatch");
    f.kernels.push_back(std::move(k));
  }
  return f;
}

}  // namespace srg
