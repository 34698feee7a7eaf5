#pragma once

#include <stdexcept>
#include <vector>

namespace srg {

// Geometric momentum grid on (0,1]: k_i = sigma^(N_k - i), i = 1..N_k, so the
// last point is exactly 1 and neighbouring points differ by the exact ratio
// 1/sigma. Quadrature weights follow the log-midpoint rule for \int_0^1 dk
// (cell edges at geometric midpoints, first cell extended down to 0, last
// capped at 1); they sum to 1 exactly.
struct MomentumGrid {
  double sigma = 0.5;
  int n_modes = 8;
  std::vector<double> k;   // size n_modes, ascending
  std::vector<double> w;   // quadrature weights, all > 0

  static MomentumGrid make(double sigma, int n_modes);

  double log_step() const;  // h = ln(1/sigma)
  bool same_as(const MomentumGrid& o) const;
};

// Radial grid for kernel profiles: {0} u {sigma^m : m = m_min..0} extended by
// {1.1, 1.2} to cover the support of the energy cutoff.
struct RGrid {
  double sigma = 0.5;
  int m_min = -10;               // most negative exponent
  std::vector<double> r;         // ascending, r[0] = 0, contains 1, last >= 1.2
  std::size_t geom_count = 0;    // points 0..geom_count-1 are {0} u {sigma^m}

  static RGrid make(double sigma, int m_min);
  static RGrid make_for(const MomentumGrid& g);  // m_min tied to the k-grid

  bool same_as(const RGrid& o) const;
  // index of an exact grid point (tolerance 1e-14 relative), or -1
  int exact_index(double x) const;
};

// Linear interpolation with flat extension below r.front() handled by the
// r[0] = 0 anchor and linear extrapolation above r.back().
double interp_linear(const std::vector<double>& xs, const std::vector<double>& ys, double x);

}  // namespace srg
