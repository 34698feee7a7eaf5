#include "srg/feshbach.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <sstream>

#include "srg/cutoff.hpp"
#include "srg/dilation.hpp"

namespace srg {

namespace {
constexpr double kSupportFloor = 1e-14;

std::vector<std::size_t> support_of(const VecD& d) {
  std::vector<std::size_t> s;
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (d[i] > kSupportFloor) s.push_back(std::size_t(i));
  return s;
}

MatC restrict_to(const MatC& m, const std::vector<std::size_t>& idx) {
  MatC out(idx.size(), idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = 0; b < idx.size(); ++b) out(a, b) = m(idx[a], idx[b]);
  return out;
}

void scatter_to(MatC& full, const MatC& block, const std::vector<std::size_t>& idx) {
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = 0; b < idx.size(); ++b) full(idx[a], idx[b]) = block(a, b);
}

double smallest_singular(const MatC& m) {
  if (m.rows() == 0) return std::numeric_limits<double>::infinity();
  Eigen::BDCSVD<MatC> svd(m);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

double largest_singular(const MatC& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::BDCSVD<MatC> svd(m);
  return svd.singularValues()(0);
}

// pseudo-inverse of the block on idx, zero elsewhere
MatC range_inverse(const MatC& m, const std::vector<std::size_t>& idx, double* margin) {
  MatC block = restrict_to(m, idx);
  if (margin) *margin = smallest_singular(block);
  MatC full = MatC::Zero(m.rows(), m.cols());
  if (!idx.empty()) scatter_to(full, block.partialPivLu().inverse(), idx);
  return full;
}

std::size_t kernel_dim(const MatC& m, const std::vector<std::size_t>& idx, double tol) {
  if (idx.empty()) return 0;
  MatC block = restrict_to(m, idx);
  Eigen::BDCSVD<MatC> svd(block);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) < tol) ++k;
  return k;
}

}  // namespace

Partition Partition::energy_cutoff(const BasisPtr& basis, double rho) {
  Partition p;
  p.rho = rho;
  p.chi.resize(basis->dim());
  p.chibar.resize(basis->dim());
  for (std::size_t i = 0; i < basis->dim(); ++i) {
    double c = CutoffProfile::chi_scaled(basis->field_energy(basis->fock_of(i)), rho);
    p.chi[i] = c;
    p.chibar[i] = std::sqrt(std::max(0.0, 1.0 - c * c));
  }
  return p;
}

Partition Partition::ground_sector_cutoff(const BasisPtr& basis, double rho) {
  Partition p = energy_cutoff(basis, rho);
  for (std::size_t i = 0; i < basis->dim(); ++i) {
    if (basis->particle_of(i) != 0) p.chi[i] = 0.0;
    p.chibar[i] = std::sqrt(std::max(0.0, 1.0 - p.chi[i] * p.chi[i]));
  }
  return p;
}

Partition Partition::hard(const BasisPtr& basis, double rho) {
  Partition p;
  p.rho = rho;
  p.chi.resize(basis->dim());
  p.chibar.resize(basis->dim());
  for (std::size_t i = 0; i < basis->dim(); ++i) {
    bool in = basis->field_energy(basis->fock_of(i)) <= rho + 1e-14;
    p.chi[i] = in ? 1.0 : 0.0;
    p.chibar[i] = in ? 0.0 : 1.0;
  }
  return p;
}

double Partition::partition_defect() const {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < chi.size(); ++i)
    worst = std::max(worst, std::abs(chi[i] * chi[i] + chibar[i] * chibar[i] - 1.0));
  return worst;
}

FeshbachResult feshbach_map(const FockOperator& h, const FockOperator& h0, const Partition& part,
                            double margin_floor) {
  h.assert_same_basis(h0);
  const std::size_t dim = h.dim();
  if (static_cast<std::size_t>(part.chi.size()) != dim)
    throw std::invalid_argument("partition dimension mismatch");

  MatC w = h.mat - h0.mat;
  VecC chi_c = part.chi.cast<Complex>();
  VecC chibar_c = part.chibar.cast<Complex>();
  auto chi = chi_c.asDiagonal();
  auto chibar = chibar_c.asDiagonal();

  MatC h_taubar = h0.mat + chibar * w * chibar;
  FeshbachResult res;
  res.chibar_diag = part.chibar;
  res.chi_support = support_of(part.chi);
  res.chibar_support = support_of(part.chibar);

  double margin = 0.0;
  res.t_inv = range_inverse(h_taubar, res.chibar_support, &margin);
  res.invertibility_margin = margin;
  if (!(margin > margin_floor)) throw NotInvertible(margin);
  res.inverse_norm = largest_singular(restrict_to(res.t_inv, res.chibar_support));

  MatC wchi = w * chi;
  MatC chiw = chi * w;
  MatC chimat = MatC::Zero(dim, dim);
  chimat.diagonal() = chi_c;
  MatC f = h0.mat + chi * w * chi - chiw * chibar * res.t_inv * chibar * wchi;
  MatC q = chimat - chibar * res.t_inv * chibar * wchi;
  MatC qs = chimat - chiw * chibar * res.t_inv * chibar;

  res.f = FockOperator(h.basis, std::move(f), false);
  res.f.hermitian = res.f.hermiticity_defect() <= 1e-12;
  res.q = FockOperator(h.basis, std::move(q), false);
  res.q_sharp = FockOperator(h.basis, std::move(qs), false);
  return res;
}

FockOperator resolvent_reconstruct(const FeshbachResult& fr, const FockOperator& h,
                                   double margin_floor) {
  double margin_f = 0.0;
  MatC f_inv = range_inverse(fr.f.mat, fr.chi_support, &margin_f);
  if (!(margin_f > margin_floor)) throw NotInvertible(margin_f);
  MatC rec = fr.q.mat * f_inv * fr.q_sharp.mat + fr.chibar_weighted_tinv();
  return FockOperator(h.basis, std::move(rec), false);
}

bool IsoReport::pass(double tol) const {
  return invertibility_agree && res_forward <= tol && res_backward <= tol && ker_h == ker_f &&
         res_identity_v1 <= tol && res_identity_v2 <= tol;
}

std::string IsoReport::to_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"margin_h\":" << margin_h << ",\"margin_f\":" << margin_f
     << ",\"invertibility_agree\":" << (invertibility_agree ? "true" : "false")
     << ",\"res_forward\":" << res_forward << ",\"res_backward\":" << res_backward
     << ",\"ker_h\":" << ker_h << ",\"ker_f\":" << ker_f
     << ",\"res_identity_v1\":" << res_identity_v1 << ",\"res_identity_v2\":" << res_identity_v2
     << ",\"t_convention\":\"tau(H)\"}";
  return os.str();
}

IsoReport isospectrality_suite(const FockOperator& h, const FockOperator& h0,
                               const Partition& part, double kernel_tol) {
  IsoReport rep;
  FeshbachResult fr = feshbach_map(h, h0, part);
  const std::size_t dim = h.dim();
  std::vector<std::size_t> all(dim);
  for (std::size_t i = 0; i < dim; ++i) all[i] = i;

  rep.margin_h = smallest_singular(h.mat);
  rep.margin_f = smallest_singular(restrict_to(fr.f.mat, fr.chi_support));
  rep.invertibility_agree = (rep.margin_h > kernel_tol) == (rep.margin_f > kernel_tol);

  rep.ker_h = kernel_dim(h.mat, all, kernel_tol);
  rep.ker_f = kernel_dim(fr.f.mat, fr.chi_support, kernel_tol);

  double hscale = std::max(1.0, largest_singular(h.mat));

  // forward: null vectors of H map through chi to null vectors of F
  {
    Eigen::BDCSVD<MatC> svd(h.mat, Eigen::ComputeThinV);
    double worst = 0.0;
    const auto& sv = svd.singularValues();
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv(i) >= kernel_tol) continue;
      VecC psi = svd.matrixV().col(i);
      VecC cpsi = part.chi.cast<Complex>().asDiagonal() * psi;
      if (cpsi.norm() < 1e-10) continue;  // degenerate with the partition; skip
      worst = std::max(worst, (fr.f.mat * cpsi).norm() / (hscale * cpsi.norm()));
    }
    rep.res_forward = worst;
  }
  // backward: null vectors of F (on Ran chi) map through Q to null vectors of H
  {
    MatC fblock = restrict_to(fr.f.mat, fr.chi_support);
    Eigen::BDCSVD<MatC> svd(fblock, Eigen::ComputeThinV);
    double worst = 0.0;
    const auto& sv = svd.singularValues();
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv(i) >= kernel_tol) continue;
      VecC phi = VecC::Zero(dim);
      for (std::size_t a = 0; a < fr.chi_support.size(); ++a)
        phi[fr.chi_support[a]] = svd.matrixV().col(i)(a);
      VecC qphi = fr.q.mat * phi;
      if (qphi.norm() < 1e-10) continue;
      worst = std::max(worst, (h.mat * qphi).norm() / (hscale * qphi.norm()));
    }
    rep.res_backward = worst;
  }
  // identities (v), only meaningful when both inverses exist
  if (rep.margin_h > kernel_tol && rep.margin_f > kernel_tol) {
    FockOperator rec = resolvent_reconstruct(fr, h);
    MatC hinv = h.mat.partialPivLu().inverse();
    rep.res_identity_v1 = (rec.mat - hinv).cwiseAbs().maxCoeff() /
                          std::max(1.0, hinv.cwiseAbs().maxCoeff());
    // the companion identity holds with T = tau(H) and the full-space F
    double margin_f_full = smallest_singular(fr.f.mat);
    double margin_h0 = smallest_singular(h0.mat);
    if (margin_f_full > kernel_tol && margin_h0 > kernel_tol) {
      MatC finv_full = fr.f.mat.partialPivLu().inverse();
      VecC chi_c = part.chi.cast<Complex>();
      VecC chb_c = part.chibar.cast<Complex>();
      MatC rhs = chi_c.asDiagonal() * hinv * chi_c.asDiagonal() +
                 chb_c.asDiagonal() * h0.mat.partialPivLu().inverse() * chb_c.asDiagonal();
      rep.res_identity_v2 = (finv_full - rhs).cwiseAbs().maxCoeff() /
                            std::max(1.0, finv_full.cwiseAbs().maxCoeff());
    }
  }
  return rep;
}

bool LapConditionsReport::all_finite() const {
  auto ok = [](double x) { return std::isfinite(x); };
  if (!(ok(ad_chi) && ok(ad_chibar) && ok(ad_chi_w) && ok(ad_w_chi))) return false;
  for (double v : ad_dk_tinv)
    if (!ok(v)) return false;
  return true;
}

std::string LapConditionsReport::to_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"ad_chi\":" << ad_chi << ",\"ad_chibar\":" << ad_chibar << ",\"ad_chi_w\":" << ad_chi_w
     << ",\"ad_w_chi\":" << ad_w_chi << ",\"ad_dk_tinv\":[";
  for (std::size_t i = 0; i < ad_dk_tinv.size(); ++i)
    os << (i ? "," : "") << ad_dk_tinv[i];
  os << "],\"all_finite\":" << (all_finite() ? "true" : "false") << "}";
  return os.str();
}

LapConditionsReport lap_transfer_conditions(const std::vector<FockOperator>& h_family,
                                            const std::vector<FockOperator>& h0_family,
                                            const Partition& part, const FockOperator& b,
                                            double lambda_step) {
  if (h_family.size() != h0_family.size() || h_family.empty())
    throw std::invalid_argument("family sizes mismatch");
  LapConditionsReport rep;
  const std::size_t dim = h_family[0].dim();
  MatC chi = MatC::Zero(dim, dim), chibar = MatC::Zero(dim, dim);
  chi.diagonal() = part.chi.cast<Complex>();
  chibar.diagonal() = part.chibar.cast<Complex>();

  auto comm_norm = [&](const MatC& x) { return largest_singular(b.mat * x - x * b.mat); };

  // W at the middle of the family
  std::size_t mid = h_family.size() / 2;
  MatC w = h_family[mid].mat - h0_family[mid].mat;
  rep.ad_chi = comm_norm(chi);
  rep.ad_chibar = comm_norm(chibar);
  rep.ad_chi_w = comm_norm(chi * w);
  rep.ad_w_chi = comm_norm(w * chi);

  // lambda derivatives of chibar T^-1 chibar by central differences
  std::vector<MatC> tinv;
  for (std::size_t i = 0; i < h_family.size(); ++i) {
    FeshbachResult fr = feshbach_map(h_family[i], h0_family[i], part);
    tinv.push_back(fr.t_inv);
  }
  rep.ad_dk_tinv.assign(3, 0.0);
  rep.ad_dk_tinv[0] = comm_norm(tinv[mid]);
  if (tinv.size() >= 3 && mid >= 1 && mid + 1 < tinv.size()) {
    MatC d1 = (tinv[mid + 1] - tinv[mid - 1]) / (2.0 * lambda_step);
    MatC d2 = (tinv[mid + 1] - 2.0 * tinv[mid] + tinv[mid - 1]) / (lambda_step * lambda_step);
    rep.ad_dk_tinv[1] = comm_norm(d1);
    rep.ad_dk_tinv[2] = comm_norm(d2);
  }
  return rep;
}

}  // namespace srg
