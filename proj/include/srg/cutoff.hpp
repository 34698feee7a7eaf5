#pragma once

#include <vector>

namespace srg {

// Smooth energy cutoff chi1(r): 1 on r <= 1, cos^2(5 pi (r-1)) ramp on
// [1, 11/10], 0 beyond. Closed-form derivatives; the audit tables sample a
// fine uniform grid for the sup bounds and the constant
//   C_chi = (4/3) (sum_{n=0..2} sup|d^n chi1| + (sup|d chi1|)^2).
struct CutoffProfile {
  double c_chi = 0.0;
  double sup_chi = 1.0;       // sup |chi1|
  double sup_dchi = 0.0;      // sup |chi1'|
  double sup_d2chi = 0.0;     // sup |chi1''|
  std::vector<double> audit_r;      // fine grid on [0, 1.2]
  std::vector<double> audit_chi;    // chi1 on audit_r
  std::vector<double> audit_dchi;   // chi1' on audit_r
  std::vector<double> audit_d2chi;  // chi1'' on audit_r

  static double chi(double r);
  static double dchi(double r);
  static double d2chi(double r);
  // chi_rho(r) = chi1(r / rho)
  static double chi_scaled(double r, double rho) { return chi(r / rho); }

  // Validates value bounds (0 <= chi <= 1, plateau/support) and the first
  // derivative bound sup|chi1'| <= 30. A C1 ramp of width 1/10 forces
  // sup|chi1''| >= 400, so no profile can keep the second derivative under
  // 30; that bound is recorded, not enforced.
  static CutoffProfile make();
};

}  // namespace srg
