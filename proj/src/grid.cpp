#include "srg/grid.hpp"

#include <cmath>

namespace srg {

MomentumGrid MomentumGrid::make(double sigma, int n_modes) {
  if (!(sigma > 0.0 && sigma < 1.0)) throw std::invalid_argument("sigma must lie in (0,1)");
  if (n_modes < 1) throw std::invalid_argument("n_modes must be >= 1");
  MomentumGrid g;
  g.sigma = sigma;
  g.n_modes = n_modes;
  g.k.resize(n_modes);
  for (int i = 0; i < n_modes; ++i) g.k[i] = std::pow(sigma, n_modes - 1 - i);
  g.k[n_modes - 1] = 1.0;
  // cell edges at geometric midpoints k_i / sqrt(sigma); first edge 0, last 1
  g.w.resize(n_modes);
  double lo = 0.0;
  const double half = 1.0 / std::sqrt(sigma);
  for (int i = 0; i < n_modes; ++i) {
    double hi = (i == n_modes - 1) ? 1.0 : g.k[i] * half;
    g.w[i] = hi - lo;
    lo = hi;
  }
  return g;
}

double MomentumGrid::log_step() const { return std::log(1.0 / sigma); }

bool MomentumGrid::same_as(const MomentumGrid& o) const {
  return sigma == o.sigma && n_modes == o.n_modes;
}

RGrid RGrid::make(double sigma, int m_min) {
  if (!(sigma > 0.0 && sigma < 1.0)) throw std::invalid_argument("sigma must lie in (0,1)");
  if (m_min > 0) throw std::invalid_argument("m_min must be <= 0");
  RGrid rg;
  rg.sigma = sigma;
  rg.m_min = m_min;
  rg.r.push_back(0.0);
  for (int m = m_min; m <= 0; ++m) rg.r.push_back(std::pow(sigma, -m));
  rg.r.back() = 1.0;
  rg.geom_count = rg.r.size();
  rg.r.push_back(1.1);
  rg.r.push_back(1.2);
  return rg;
}

RGrid RGrid::make_for(const MomentumGrid& g) {
  // floor at the infrared end of the momentum grid: r-structure below the
  // smallest resolvable photon energy is not a measurement
  return make(g.sigma, -(g.n_modes - 1));
}

bool RGrid::same_as(const RGrid& o) const { return sigma == o.sigma && m_min == o.m_min; }

int RGrid::exact_index(double x) const {
  for (std::size_t i = 0; i < r.size(); ++i) {
    double scale = std::max(1.0, std::abs(x));
    if (std::abs(r[i] - x) <= 1e-14 * scale) return static_cast<int>(i);
  }
  return -1;
}

double interp_linear(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  if (xs.size() != ys.size() || xs.empty()) throw std::invalid_argument("interp size mismatch");
  if (xs.size() == 1) return ys[0];
  if (x <= xs.front()) {
    double t = (x - xs[0]) / (xs[1] - xs[0]);
    return ys[0] + t * (ys[1] - ys[0]);
  }
  if (x >= xs.back()) {
    std::size_t n = xs.size();
    double t = (x - xs[n - 2]) / (xs[n - 1] - xs[n - 2]);
    return ys[n - 2] + t * (ys[n - 1] - ys[n - 2]);
  }
  std::size_t hi = 1;
  while (xs[hi] < x) ++hi;
  double t = (x - xs[hi - 1]) / (xs[hi] - xs[hi - 1]);
  return ys[hi - 1] + t * (ys[hi] - ys[hi - 1]);
}

}  // namespace srg
