#pragma once

#include <optional>
#include <string>
#include <vector>

#include "srg/fock.hpp"

namespace srg {

// Smooth partition of unity chi^2 + chibar^2 = 1, both diagonal on the basis
// (functions of H_f, optionally restricted to one particle sector).
struct Partition {
  double rho = 0.5;
  VecD chi;     // diagonal entries
  VecD chibar;

  // chi = chi1(H_f / rho) on every particle sector
  static Partition energy_cutoff(const BasisPtr& basis, double rho);
  // chi = chi1(H_f / rho) on particle level 0, zero elsewhere (pi_0)
  static Partition ground_sector_cutoff(const BasisPtr& basis, double rho);
  // sharp 0/1 projection at H_f <= rho
  static Partition hard(const BasisPtr& basis, double rho);

  double partition_defect() const;  // max |chi^2 + chibar^2 - 1|
};

struct NotInvertible : std::runtime_error {
  double margin;
  explicit NotInvertible(double m)
      : std::runtime_error("complement block not invertible (margin " + std::to_string(m) + ")"),
        margin(m) {}
};

struct FeshbachResult {
  FockOperator f;        // decimated operator, supported on the chi range
  FockOperator q;        // right companion: H Q = (something) F
  FockOperator q_sharp;  // left companion
  MatC t_inv;            // chibar-range inverse of H0 + chibar W chibar (pseudo off-range)
  VecD chibar_diag;      // smooth chibar weights of the partition used
  double inverse_norm = 0.0;
  double invertibility_margin = 0.0;  // smallest singular value on the chibar range
  std::vector<std::size_t> chi_support;
  std::vector<std::size_t> chibar_support;

  MatC chibar_weighted_tinv() const {
    VecC cb = chibar_diag.cast<Complex>();
    return cb.asDiagonal() * t_inv * cb.asDiagonal();
  }
};

// Smooth Feshbach-Schur decimation of H = H0 + W with tau(H) = H0 (H0 must
// commute with the partition; for kernel families H0 = w00(H_f)).
FeshbachResult feshbach_map(const FockOperator& h, const FockOperator& h0, const Partition& part,
                            double margin_floor = 1e-8);

// Q F^-1 Q# + chibar T^-1 chibar; throws if F is not invertible on its range.
FockOperator resolvent_reconstruct(const FeshbachResult& fr, const FockOperator& h,
                                   double margin_floor = 1e-8);

struct IsoReport {
  double margin_h = 0.0, margin_f = 0.0;
  bool invertibility_agree = false;
  double res_forward = 0.0;   // ||F(chi psi)|| / scale for H psi = 0
  double res_backward = 0.0;  // ||H(Q phi)|| / scale for F phi = 0
  std::size_t ker_h = 0, ker_f = 0;
  double res_identity_v1 = 0.0;  // Q F^-1 Q# + chibar T^-1 chibar vs H^-1
  double res_identity_v2 = 0.0;  // F^-1 vs chi H^-1 chi + chibar T^-1 chibar on Ran chi
  bool pass(double tol = 1e-8) const;
  std::string to_json() const;
};

IsoReport isospectrality_suite(const FockOperator& h, const FockOperator& h0,
                               const Partition& part, double kernel_tol = 1e-8);

struct LapConditionsReport {
  double ad_chi = 0.0, ad_chibar = 0.0, ad_chi_w = 0.0, ad_w_chi = 0.0;
  std::vector<double> ad_dk_tinv;  // k = 0, 1, 2 lambda-derivatives
  bool all_finite() const;
  std::string to_json() const;
};

// Hypothesis ledger for LAP propagation over a lambda-family: norms of
// ad_B(A) for A = chi, chibar, chi W, W chi and lambda-derivatives of
// chibar T^-1 chibar (central differences on the lambda grid).
LapConditionsReport lap_transfer_conditions(const std::vector<FockOperator>& h_family,
                                            const std::vector<FockOperator>& h0_family,
                                            const Partition& part, const FockOperator& b,
                                            double lambda_step);

}  // namespace srg
