#include "srg/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace srg {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<double> parse_list(const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

}  // namespace

RunConfig RunConfig::from_file(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str(), overrides);
}

RunConfig RunConfig::from_text(const std::string& text, const std::vector<std::string>& overrides) {
  RunConfig c;
  std::string section;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("malformed config line: " + line);
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    c.raw[section.empty() ? key : section + "." + key] = val;
  }
  for (const auto& ov : overrides) {
    auto eq = ov.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("malformed override: " + ov);
    c.raw[trim(ov.substr(0, eq))] = trim(ov.substr(eq + 1));
  }

  auto get = [&](const std::string& k) -> std::optional<std::string> {
    auto it = c.raw.find(k);
    if (it == c.raw.end()) return std::nullopt;
    return it->second;
  };
  if (auto v = get("model.levels")) c.levels = parse_list(*v);
  if (auto v = get("model.g")) c.g = std::stod(*v);
  if (auto v = get("model.mu")) c.mu = std::stod(*v);
  if (auto v = get("model.kappa")) c.kappa_spec = *v;
  if (auto v = get("model.coupling")) c.coupling_spec = *v;
  if (auto v = get("grid.sigma")) c.sigma = std::stod(*v);
  if (auto v = get("grid.nk")) c.nk = std::stoi(*v);
  if (auto v = get("grid.nmax")) c.nmax = std::stoi(*v);
  if (auto v = get("grid.emax")) c.emax = std::stod(*v);
  if (auto v = get("rg.rho")) c.rho = std::stod(*v);
  if (auto v = get("rg.rho0")) c.rho0 = std::stod(*v);
  if (auto v = get("rg.nsteps")) c.nsteps = std::stoi(*v);
  if (auto v = get("rg.tol")) c.tol = std::stod(*v);
  if (auto v = get("verify.thetas")) c.thetas = parse_list(*v);
  if (auto v = get("verify.window_nmax")) c.window_nmax = std::stoi(*v);
  if (auto v = get("verify.nlambda")) c.nlambda = std::stoi(*v);
  if (auto v = get("verify.ntimes")) c.ntimes = std::stoi(*v);
  if (auto v = get("verify.lap_nk")) c.lap_nk = std::stoi(*v);
  if (auto v = get("output.dir")) c.out_dir = *v;
  if (auto v = get("seed")) c.seed = std::stoull(*v);
  if (auto v = get("output.seed")) c.seed = std::stoull(*v);
  return c;
}

void RunConfig::validate() const {
  std::vector<std::string> errors;
  if (!(sigma > 0.0 && sigma < 1.0)) errors.push_back("grid.sigma must lie in (0,1)");
  if (nk < 3) errors.push_back("grid.nk must be >= 3");
  if (nmax < 1) errors.push_back("grid.nmax must be >= 1");
  if (!(emax > 0.0)) errors.push_back("grid.emax must be positive");
  if (levels.size() < 2) errors.push_back("model.levels needs at least two levels");
  for (std::size_t i = 1; i < levels.size(); ++i)
    if (!(levels[i] > levels[i - 1])) errors.push_back("model.levels must be strictly increasing");
  if (!(g >= 0.0)) errors.push_back("model.g must be non-negative");
  if (!(mu > 0.0)) errors.push_back("model.mu must be positive");
  // rho must be sigma^p
  double p = std::log(rho) / std::log(sigma);
  if (!(rho > 0.0 && rho < 1.0) || std::abs(p - std::lround(p)) > 1e-10 || std::lround(p) < 1)
    errors.push_back("rg.rho must be sigma^p");
  if (levels.size() >= 2) {
    double gap = levels[1] - levels[0];
    if (rho0 > gap + 1e-12) errors.push_back("rg.rho0 must not exceed the particle gap");
  }
  if (rho0 < 100.0 * g * g) errors.push_back("rg.rho0 must be >= 100 g^2");
  if (std::abs(rho0 - 1.0) > 1e-14) {
    double p0 = std::log(rho0) / std::log(sigma);
    if (!(rho0 > 0.0 && rho0 < 1.0) || std::abs(p0 - std::lround(p0)) > 1e-10)
      errors.push_back("rg.rho0 must be 1 or sigma^p");
  }
  if (nsteps < 1) errors.push_back("rg.nsteps must be >= 1");
  if (!(tol > 0.0)) errors.push_back("rg.tol must be positive");
  for (double th : thetas)
    if (!(th > 0.0 && th <= 1.0)) errors.push_back("verify.thetas must lie in (0,1]");
  if (!errors.empty()) {
    std::string msg = "config validation failed:";
    for (const auto& e : errors) msg += "\n  - " + e;
    throw std::invalid_argument(msg);
  }
}

std::string RunConfig::canonical_text() const {
  std::ostringstream os;
  os.precision(17);
  os << "[model]\nlevels=";
  for (std::size_t i = 0; i < levels.size(); ++i) os << (i ? "," : "") << levels[i];
  os << "\ng=" << g << "\nmu=" << mu << "\nkappa=" << kappa_spec
     << "\ncoupling=" << coupling_spec << "\n[grid]\nsigma=" << sigma << "\nnk=" << nk
     << "\nnmax=" << nmax << "\nemax=" << emax << "\n[rg]\nrho=" << rho << "\nrho0=" << rho0
     << "\nnsteps=" << nsteps << "\ntol=" << tol << "\n[verify]\nthetas=";
  for (std::size_t i = 0; i < thetas.size(); ++i) os << (i ? "," : "") << thetas[i];
  os << "\nwindow_nmax=" << window_nmax << "\nnlambda=" << nlambda << "\nntimes=" << ntimes
     << "\nlap_nk=" << lap_nk << "\n[output]\ndir=" << out_dir;
  if (seed) os << "\nseed=" << *seed;
  os << "\n";
  return os.str();
}

}  // namespace srg
