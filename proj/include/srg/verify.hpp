#pragma once

#include <string>
#include <vector>

#include "srg/feshbach.hpp"
#include "srg/fock.hpp"
#include "srg/kernel.hpp"

namespace srg {

struct EigenSystem {
  VecD values;   // ascending
  MatC vectors;  // columns
  double max_residual = 0.0;
};

// Dense hermitian eigendecomposition; the ground-truth oracle.
EigenSystem exact_diag(const FockOperator& h);

// ||B_theta (H - lambda - i eps)^-1 B_theta|| by dense solve.
double weighted_resolvent(const FockOperator& h, const FockOperator& b_theta, double lambda,
                          double eps);

struct ScanRow {
  double x = 0.0;    // lambda or t
  double eps = 0.0;  // 0 for time scans
  double value = 0.0;
};

struct ScanTable {
  std::vector<ScanRow> rows;
  double theta = 0.0;
  double nu_fit = 0.0;
  double window_lo = 0.0, window_hi = 0.0;
  std::string kind;  // "lap" or "decay"

  std::string to_csv() const;
  std::string to_json() const;
};

// 2x the mean nearest-neighbour eigenvalue gap inside [lo, hi]
double local_eps_floor(const VecD& eigenvalues, double lo, double hi);

struct LapScanResult {
  ScanTable table;            // values at eps_floor
  double eps_floor = 0.0;
  double sup_at_floor = 0.0;
  double sup_at_8floor = 0.0;
  double growth = 0.0;        // sup(floor)/sup(8 floor) - 1
  double holder_exponent = 0.0;
  bool window_shrunk = false;
};

LapScanResult lap_scan(const FockOperator& h, const FockOperator& b_theta, double theta,
                       double window_lo, double window_hi, int n_lambda, double eps_floor);

struct DecayScanResult {
  ScanTable table;
  double t0_value = 0.0;
  double t_rec = 0.0;
  double nu_fit = 0.0;
  double monotone_fraction = 0.0;
  double final_ratio = 0.0;   // value at T_rec/2 over value at 0
  int levels_in_support = 0;
  bool discrete_spectrum_caveat = true;  // asymptotic power law not reproducible
};

// f realized as a smooth bump on [f_lo, f_hi] through functional calculus;
// evolution by spectral decomposition; times span [0, T_rec/2].
DecayScanResult decay_scan(const FockOperator& h, const FockOperator& b_theta, double f_lo,
                           double f_hi, int n_times);

struct MourreReport {
  double delta = 0.0;
  double min_eig_restricted = 0.0;  // on the spectral window of H1
  double min_eig_full = 0.0;        // min(0, restricted)
  double threshold = 0.0;           // -(1/20) delta acceptance line
  double w_tilde_defect = 0.0;      // ||W~ - W/2||
  double gamma = 0.0;               // family interaction coordinate
  double implied_c = 0.0;           // w_tilde_defect / gamma
  std::size_t window_dim = 0;
  std::string to_json() const;
};

// Positive-commutator check on H1 = H - w00(0): the commutator i[H1,B] is
// realized through its normal-form decomposition T~ + W~ with
// T~ = T'(H_f) H_f by functional calculus on the w00 profile and W~ = i[W,B];
// reports the smallest eigenvalue of E (T~ + W~) E - (delta/4) E^2 on the
// spectral window Delta' = (delta/2, inf) of H1.
MourreReport mourre_check(const KernelFamily& fam, const BasisPtr& basis, const FockOperator& b,
                          double delta);

struct WindowSchedule {
  struct Window {
    double lo = 0.0, hi = 0.0;
    double delta_n = 0.0;
  };
  std::vector<Window> windows;
  double e_g = 0.0, rho = 0.5, rho0 = 1.0;
  bool covers(double lo, double hi) const;
  std::string to_json() const;
};

// Windows [e_g + rho0 rho delta_n / 2, e_g + rho0 delta_n], delta_n = rho^n/18,
// n = 0..n_max; consecutive windows overlap and the union covers
// (e_g + rho0 rho delta_nmax / 2, e_g + rho0/18].
WindowSchedule window_schedule(double e_g, double rho, double rho0, int n_max);

struct LapTransferCheck {
  double holder_decimated = 0.0;
  double holder_original = 0.0;
  double sup_decimated = 0.0;
  double sup_original = 0.0;
  double ratio = 0.0;  // original modulus over decimated modulus
  std::string to_json() const;
};

// Numerical shadow of LAP propagation: Hoelder moduli of the weighted
// resolvents of the decimated family and of the original family across a
// lambda window, with the controlling ratio recorded.
LapTransferCheck lap_transfer_check(const std::vector<FockOperator>& h_family,
                                    const std::vector<FockOperator>& h0_family,
                                    const std::vector<double>& lambdas, const Partition& part,
                                    const FockOperator& b_theta, double eps_floor);

}  // namespace srg
