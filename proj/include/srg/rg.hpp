#pragma once

#include <functional>
#include <string>
#include <vector>

#include "srg/assemble.hpp"
#include "srg/feshbach.hpp"
#include "srg/kernel.hpp"

namespace srg {

// rho must be an integer power sigma^p, p >= 1; returns p
int grid_power(double rho, double sigma);

// Polydisc coordinates of a family: alpha = |w00(0)|, beta = sup|w00'-1|,
// gamma = xi-weighted interaction norm. alpha and beta are xi-independent.
struct PolydiscParams {
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
  double mu = 0.5;
  int s = 2;
  double xi = 0.6;
};

PolydiscParams polydisc_membership(const KernelFamily& f);
PolydiscParams polydisc_membership(const KernelFamily& f, double xi_override, int s_override);

// s_rho(w)[r;k] = rho^(m+n-1) w[rho r; rho k] as an exact index relabelling on
// the geometric grids; modes that scale below the infrared end of the grid
// are filled with the |k|^mu extrapolation from the lowest stored mode.
KernelFamily scale_kernels(const KernelFamily& f, double rho);

struct RgStepResult {
  KernelFamily family;
  Complex e_shift;           // rho^-1 <H>_Omega, removed from the constant
  double margin = 0.0;       // complement invertibility margin of the step
  ExtractReport extract;
};

RgStepResult rg_step(const KernelFamily& f, double rho, const BasisPtr& basis,
                     double margin_floor = 1e-8);

enum class FlowStatus { completed, escaped, not_invertible };

struct RGTraceRow {
  int step = 0;                   // 1-based
  Complex e_shift{0.0, 0.0};
  Complex unstable{0.0, 0.0};     // w00(0) residual after the shift
  Complex cumulative{0.0, 0.0};   // unstable component with the removed
                                  // constants restored: residual + sum_k rho^(k-n) shift_k
  double alpha = 0.0, beta = 0.0, gamma = 0.0;  // family-xi coordinates (post-step)
  double gamma_audit = 0.0;       // theorem-xi coordinate (post-step)
  double alpha_pred = 0.0, beta_pred = 0.0, gamma_pred = 0.0;  // bounds from the pre-step state
  double margin = 0.0;
};

struct RGTrace {
  double rho = 0.5;
  double rho0 = 1.0;
  double lambda = 0.0;            // spectral parameter this flow was run at
  double c_chi = 0.0;
  double xi_audit = 0.0;
  double escape_threshold = 1.0 / 18.0;
  FlowStatus status = FlowStatus::completed;
  int stop_step = 0;              // step index at escape / failure, 0 if completed
  int escape_sign = 0;
  PolydiscParams initial;         // coordinates of the input family
  double initial_gamma_audit = 0.0;
  std::vector<RGTraceRow> rows;
  std::vector<std::vector<Complex>> w00_snapshots;
  std::vector<double> snapshot_r;

  std::string to_json() const;
  std::string to_csv() const;
};

// Iterate rg_step, removing rho^-1 <H>_Omega each step; the removed
// constants are re-accumulated with rho^(k-n) weights so the cumulative
// unstable component E_n is reproducible, and the flow stops early once
// |E_n| leaves the 1/18 tube.
RGTrace rg_iterate(const KernelFamily& f0, double rho, int n_steps, const BasisPtr& basis,
                   double escape_threshold = 1.0 / 18.0, double margin_floor = 1e-8);

struct ContractionAuditRow {
  int step = 0;
  double alpha = 0.0, dbeta = 0.0, gamma = 0.0;
  double alpha_bound = 0.0, dbeta_bound = 0.0, gamma_bound = 0.0;
  bool pass = false;
};

struct ContractionAudit {
  std::vector<ContractionAuditRow> rows;
  double fitted_rate = 0.0;      // geometric fit of gamma_audit over steps
  double rate_bound = 0.0;       // 128 C_chi^2 rho^mu
  double implied_c = 0.0;        // fitted_rate / rho^mu
  bool pass = false;
  std::string to_json() const;
};

ContractionAudit contraction_audit(const RGTrace& trace, double mu);

struct BisectResult {
  double e_g = 0.0;
  double bracket = 0.0;
  int probes = 0;
  RGTrace trace;  // flow at the converged lambda
};

// Bisection on the escape sign of the flow: lambda below the ground state
// energy escapes with a positive unstable component, above with negative.
BisectResult gs_energy_bisect(const std::function<KernelFamily(double)>& initial_family,
                              double lambda_lo, double lambda_hi, double rho, int n_steps,
                              double tol, const BasisPtr& basis);

struct ESeriesReport {
  double estimate = 0.0;                  // sum_i rho^i Delta_i E
  std::vector<double> terms;              // rho^i Delta_i E
  std::vector<double> partial_sums;
  std::vector<double> tail_envelope;      // 2 rho^i |Delta_i E| reference
  bool converged = true;
};

ESeriesReport e_series_estimate(const RGTrace& trace);

}  // namespace srg
