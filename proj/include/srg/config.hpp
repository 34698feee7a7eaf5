#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace srg {

// Sectioned key=value configuration ([section] headers, '#' comments).
struct RunConfig {
  // model
  std::vector<double> levels{0.0, 1.0};
  double g = 0.02;
  double mu = 0.5;
  std::string kappa_spec = "default";     // "default" or a CSV path (columns k,value)
  std::string coupling_spec = "default";  // "default" or a CSV path

  // grid
  double sigma = 0.5;
  int nk = 8;
  int nmax = 2;
  double emax = 2.0;

  // rg
  double rho = 0.5;
  double rho0 = 1.0;
  int nsteps = 20;
  double tol = 1e-9;

  // verify
  std::vector<double> thetas{0.75, 1.0};
  int window_nmax = 3;
  int nlambda = 24;
  int ntimes = 60;
  int lap_nk = 12;  // denser grid for the resolvent/decay scans

  // output
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;

  std::map<std::string, std::string> raw;  // everything as section.key -> value

  static RunConfig defaults() { return {}; }
  static RunConfig from_file(const std::string& path,
                             const std::vector<std::string>& overrides = {});
  static RunConfig from_text(const std::string& text,
                             const std::vector<std::string>& overrides = {});

  // throws std::invalid_argument with a machine-readable message list
  void validate() const;
  std::string canonical_text() const;  // deterministic rendering for hashing
};

}  // namespace srg
