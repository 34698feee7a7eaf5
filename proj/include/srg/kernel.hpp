#pragma once

#include <complex>
#include <string>
#include <vector>

#include "srg/cutoff.hpp"
#include "srg/grid.hpp"

namespace srg {

using Complex = std::complex<double>;

// Coupling function w_{m,n}[r; k_(m), k~_(n)] tabulated on the geometric
// r-grid (r in [0,1]) times the momentum grid in each of the m+n slots.
// Symmetric under permutations inside the creation block and inside the
// annihilation block (only visible for (2,0)/(0,2) at this order).
struct WickKernel {
  int m = 0, n = 0;
  std::vector<double> r;        // ascending, r[0] = 0, last = 1
  int n_modes = 0;
  double sigma = 0.5;           // grid ratio; mode points are sigma^(n_modes-1-j)
  std::vector<Complex> values;  // size r.size() * n_modes^(m+n), row-major in (ir, j1[, j2])

  int order() const { return m + n; }
  std::size_t k_count() const;
  std::size_t idx(std::size_t ir, int j1, int j2 = 0) const;
  Complex& at(std::size_t ir, int j1, int j2 = 0);
  Complex at(std::size_t ir, int j1, int j2 = 0) const;
  // linear interpolation in r at fixed mode tuple
  Complex eval(double rr, int j1, int j2 = 0) const;

  static WickKernel zero(int m, int n, const std::vector<double>& rpts, int n_modes,
                         double sigma);
  std::vector<double> mode_points() const;
  void symmetrize();  // enforce the block permutation symmetry
};

// A full kernel family: the field profile w00 on the extended r-grid plus the
// interaction kernels with 1 <= m+n <= 2, and the space parameters.
struct KernelFamily {
  MomentumGrid grid;
  RGrid rgrid;
  std::vector<Complex> w00;     // over rgrid.r
  std::vector<WickKernel> kernels;
  double mu = 0.5;
  int s = 2;
  double xi = 0.6;

  Complex w00_at(double rr) const;       // linear interp, linear extrapolation above
  Complex w00_derivative(double rr) const;
  const WickKernel* kernel(int m, int n) const;
  WickKernel* kernel(int m, int n);
  WickKernel& ensure_kernel(int m, int n);
  void drop_zero_kernels(double floor = 0.0);

  // H_f itself: w00(r) = r, no interaction kernels
  static KernelFamily free_field(const MomentumGrid& g, double mu, int s, double xi);
};

enum class NormVariant { mu, mu_s, w00, family_xi };

// ||w||_mu = max_j sup |k_j|^(-mu) |w| over the stored grid
double kernel_norm_mu(const WickKernel& k, double mu);
// sum over 0 <= a + |q| <= s of ||d_r^a (k d_k)^q w||_mu; discrete stencils
double kernel_norm_mu_s(const WickKernel& k, double mu, int s);
// |w00(0)| + sum_{1<=a<=s} sup_{r in [0,1]} |d_r^a w00|
double w00_norm(const KernelFamily& f, int s);
// sum_{m+n>=0} xi^-(m+n) ||w_{m,n}||_{mu,s}
double family_norm_xi(const KernelFamily& f, double mu, int s, double xi);
// interaction part only (m+n >= 1); this is the polydisc gamma
double interaction_norm_xi(const KernelFamily& f, double mu, int s, double xi);

double kernel_norm(const KernelFamily& f, NormVariant v);

// discrete derivative tables used by the norms (exposed for the tests)
std::vector<Complex> derivative_r(const std::vector<double>& r, const std::vector<Complex>& v);
std::vector<Complex> derivative_r2(const std::vector<double>& r, const std::vector<Complex>& v);

// JSON serialization; bit-exact round trip
std::string family_to_json(const KernelFamily& f);
KernelFamily family_from_json(const std::string& text);

}  // namespace srg
