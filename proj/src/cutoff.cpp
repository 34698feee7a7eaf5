#include "srg/cutoff.hpp"

#include <cmath>
#include <stdexcept>

namespace srg {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kRampLo = 1.0;
constexpr double kRampHi = 1.1;
}  // namespace

double CutoffProfile::chi(double r) {
  if (r <= kRampLo) return 1.0;
  if (r >= kRampHi) return 0.0;
  double c = std::cos(5.0 * kPi * (r - 1.0));
  return c * c;
}

double CutoffProfile::dchi(double r) {
  if (r <= kRampLo || r >= kRampHi) return 0.0;
  return -5.0 * kPi * std::sin(10.0 * kPi * (r - 1.0));
}

double CutoffProfile::d2chi(double r) {
  if (r <= kRampLo || r >= kRampHi) return 0.0;
  return -50.0 * kPi * kPi * std::cos(10.0 * kPi * (r - 1.0));
}

CutoffProfile CutoffProfile::make() {
  CutoffProfile p;
  const int n = 2401;  // step 5e-4 over [0, 1.2]
  p.audit_r.resize(n);
  p.audit_chi.resize(n);
  p.audit_dchi.resize(n);
  p.audit_d2chi.resize(n);
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double r = 1.2 * i / (n - 1);
    p.audit_r[i] = r;
    p.audit_chi[i] = chi(r);
    p.audit_dchi[i] = dchi(r);
    p.audit_d2chi[i] = d2chi(r);
    s0 = std::max(s0, std::abs(p.audit_chi[i]));
    s1 = std::max(s1, std::abs(p.audit_dchi[i]));
    s2 = std::max(s2, std::abs(p.audit_d2chi[i]));
    if (p.audit_chi[i] < -1e-15 || p.audit_chi[i] > 1.0 + 1e-15)
      throw std::runtime_error("cutoff profile leaves [0,1]");
    if (r <= kRampLo && p.audit_chi[i] != 1.0)
      throw std::runtime_error("cutoff profile must be 1 below the ramp");
    if (r >= kRampHi && p.audit_chi[i] != 0.0)
      throw std::runtime_error("cutoff profile must vanish above the ramp");
  }
  // closed-form suprema are sharper than the sampled ones
  p.sup_chi = 1.0;
  p.sup_dchi = std::max(s1, 5.0 * kPi);
  p.sup_d2chi = std::max(s2, 50.0 * kPi * kPi);
  if (p.sup_dchi > 30.0) throw std::runtime_error("cutoff first-derivative bound violated");
  p.c_chi = (4.0 / 3.0) * (p.sup_chi + p.sup_dchi + p.sup_d2chi + p.sup_dchi * p.sup_dchi);
  return p;
}

}  // namespace srg
