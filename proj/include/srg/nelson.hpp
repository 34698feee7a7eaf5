#pragma once

#include <string>
#include <vector>

#include "srg/assemble.hpp"
#include "srg/feshbach.hpp"
#include "srg/kernel.hpp"

namespace srg {

// Finite-level particle system linearly coupled to scalar massless bosons.
// kappa is normalized so the discrete analogue of the infrared norm
// (sum_i w_i kappa_i^2 k_i^-(1+2mu))^(1/2) equals 1; the default profile
// kappa(k) = k^(mu+1/2) satisfies that identity on the log-midpoint grid.
struct NelsonConfig {
  std::vector<double> levels;            // particle energies, ascending
  double g = 0.02;
  double mu = 0.5;
  std::vector<double> kappa;             // per momentum mode
  std::vector<MatC> coupling;            // per mode, n_p x n_p matrix G(k)
  MomentumGrid grid;

  int n_p() const { return static_cast<int>(levels.size()); }
  double gap() const { return levels.at(1) - levels.at(0); }

  static NelsonConfig default_toy(const MomentumGrid& grid, int n_p, double gap, double g,
                                  double mu);
  void normalize_kappa();
  double kappa_norm_mu() const;
};

// H = H_p (x) 1 + 1 (x) H_f
//     + g sum_i sqrt(w_i/k_i) kappa_i (G(k_i) (x) A_i^+ + G(k_i)^+ (x) A_i)
FockOperator build_nelson(const NelsonConfig& cfg, const BasisPtr& basis);

// Kato relative bound ||I psi|| <= a ||H0 psi|| + b ||psi|| measured over
// random states;reports the smallest (a, b) on the sample in the least-squares sense.
struct RelativeBound {
  double a = 0.0, b = 0.0;
};
RelativeBound interaction_relative_bound(const NelsonConfig& cfg, const BasisPtr& basis,
                                         std::uint64_t seed, int n_samples = 64);

struct InitialReport {
  double lambda = 0.0;
  double rho0 = 1.0;
  double alpha0 = 0.0, beta0 = 0.0, gamma0 = 0.0;  // constant shifted by rho0^-1(e0-lambda)
  double margin = 0.0;                  // complement invertibility margin
  double complement_bound = 0.0;        // (7/8) gap reference value
  ExtractReport extract;
};

// Smooth decimation onto the particle ground sector at photon scale rho0,
// followed by the rho0 rescaling and kernel extraction. lambda must satisfy
// lambda <= e0 + rho0/2; rho0 must be a sigma power and >= 100 g^2.
KernelFamily initial_decimation(const NelsonConfig& cfg, const FockOperator& h_g, double lambda,
                                double rho0, const BasisPtr& flow_basis,
                                InitialReport* report = nullptr);

struct InitialAuditRow {
  double oracle_energy = 0.0;
  double reconstructed = 0.0;  // secular fixed point lambda + rho0 * eig
  double error = 0.0;
  int iterations = 0;
};

struct InitialAuditReport {
  std::vector<InitialAuditRow> rows;
  double window_hi = 0.0;  // e0 + rho0/2
  double worst_error = 0.0;
  std::string to_json() const;
};

// Isospectral consistency of the initial decimation: for each low-lying
// oracle eigenvalue inside the window, iterate the secular fixed point
// lambda <- lambda + rho0 * eig_i(assembled family at lambda) and compare.
InitialAuditReport initial_audit(const NelsonConfig& cfg, const BasisPtr& tensor_basis,
                                 const BasisPtr& flow_basis, double rho0, int n_levels = 3);

}  // namespace srg
