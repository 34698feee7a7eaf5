#include "srg/fock.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace srg {

namespace {

void enumerate_occupations(const MomentumGrid& g, int n_max, double e_max,
                           std::vector<TruncatedFockBasis::Occ>& out) {
  // depth-first over modes, pruning on count and energy
  TruncatedFockBasis::Occ cur(g.n_modes, 0);
  const double tol = 1e-12;
  std::function<void(int, int, double)> rec = [&](int mode, int used, double energy) {
    if (mode == g.n_modes) {
      out.push_back(cur);
      return;
    }
    for (int n = 0; used + n <= n_max; ++n) {
      double e = energy + n * g.k[mode];
      if (e > e_max + tol) break;
      cur[mode] = static_cast<std::uint8_t>(n);
      rec(mode + 1, used + n, e);
    }
    cur[mode] = 0;
  };
  rec(0, 0, 0.0);
}

}  // namespace

std::shared_ptr<const TruncatedFockBasis> TruncatedFockBasis::build(const MomentumGrid& grid,
                                                                    int n_max, double e_max,
                                                                    int n_p,
                                                                    std::size_t dim_cap) {
  if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");
  if (!(e_max > 0.0)) throw std::invalid_argument("e_max must be > 0");
  if (n_p < 1) throw std::invalid_argument("particle_dim must be >= 1");

  auto b = std::make_shared<TruncatedFockBasis>();
  b->grid_ = grid;
  b->n_max_ = n_max;
  b->e_max_ = e_max;
  b->n_p_ = n_p;
  enumerate_occupations(grid, n_max, e_max, b->occs_);

  // canonical order: total photon number, then lexicographic occupations
  std::sort(b->occs_.begin(), b->occs_.end(), [&](const Occ& a, const Occ& c) {
    int ta = 0, tc = 0;
    for (auto v : a) ta += v;
    for (auto v : c) tc += v;
    if (ta != tc) return ta < tc;
    return a < c;
  });
  b->occs_.erase(std::unique(b->occs_.begin(), b->occs_.end()), b->occs_.end());

  if (static_cast<std::size_t>(n_p) * b->occs_.size() > dim_cap)
    throw std::runtime_error("basis dimension exceeds configured cap");

  b->energy_.reserve(b->occs_.size());
  b->totals_.reserve(b->occs_.size());
  for (const auto& o : b->occs_) {
    double e = 0.0;
    int t = 0;
    for (int i = 0; i < grid.n_modes; ++i) {
      e += o[i] * grid.k[i];
      t += o[i];
    }
    b->energy_.push_back(e);
    b->totals_.push_back(t);
  }
  b->lookup_.reserve(b->occs_.size());
  for (std::size_t i = 0; i < b->occs_.size(); ++i) b->lookup_.emplace_back(b->occs_[i], i);
  std::sort(b->lookup_.begin(), b->lookup_.end());
  return b;
}

long TruncatedFockBasis::find(const Occ& o) const {
  auto it = std::lower_bound(lookup_.begin(), lookup_.end(), o,
                             [](const std::pair<Occ, std::size_t>& p, const Occ& key) {
                               return p.first < key;
                             });
  if (it == lookup_.end() || it->first != o) return -1;
  return static_cast<long>(it->second);
}

bool TruncatedFockBasis::same_as(const TruncatedFockBasis& o) const {
  return grid_.same_as(o.grid_) && n_max_ == o.n_max_ && e_max_ == o.e_max_ && n_p_ == o.n_p_;
}

FockOperator::FockOperator(BasisPtr b, MatC m, bool herm)
    : basis(std::move(b)), mat(std::move(m)), hermitian(herm) {
  if (mat.rows() != mat.cols() || static_cast<std::size_t>(mat.rows()) != basis->dim())
    throw std::invalid_argument("operator dimension does not match basis");
}

double FockOperator::hermiticity_defect() const {
  double scale = mat.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (mat - mat.adjoint()).cwiseAbs().maxCoeff() / scale;
}

void FockOperator::assert_same_basis(const FockOperator& o) const {
  if (!basis || !o.basis || !basis->same_as(*o.basis))
    throw std::invalid_argument("operators live on different bases");
}

BasisPtr build_basis(const MomentumGrid& grid, int n_max, double e_max, int n_p,
                     std::size_t dim_cap) {
  return TruncatedFockBasis::build(grid, n_max, e_max, n_p, dim_cap);
}

FockOperator ladder_op(const BasisPtr& basis, int mode, LadderKind kind) {
  if (mode < 1 || mode > basis->grid().n_modes) throw std::invalid_argument("mode out of range");
  const int mi = mode - 1;
  const std::size_t fd = basis->fock_dim();
  MatC m = MatC::Zero(basis->dim(), basis->dim());
  for (std::size_t f = 0; f < fd; ++f) {
    const auto& o = basis->occ(f);
    if (o[mi] == 0) continue;
    auto lowered = o;
    lowered[mi] -= 1;
    long tgt = basis->find(lowered);
    if (tgt < 0) continue;  // cannot happen: truncation is downward closed
    double amp = std::sqrt(static_cast<double>(o[mi]));
    for (int p = 0; p < basis->particle_dim(); ++p)
      m(basis->index(p, tgt), basis->index(p, f)) = amp;
  }
  if (kind == LadderKind::create) return FockOperator(basis, m.adjoint(), false);
  return FockOperator(basis, std::move(m), false);
}

FockOperator build_hf(const BasisPtr& basis) {
  return diagonal_of_energy(basis, [](double e) { return e; });
}

FockOperator identity_op(const BasisPtr& basis) {
  return FockOperator(basis, MatC::Identity(basis->dim(), basis->dim()), true);
}

std::vector<std::size_t> interior_mode_states(const BasisPtr& basis) {
  std::vector<std::size_t> out;
  const int nk = basis->grid().n_modes;
  for (std::size_t i = 0; i < basis->dim(); ++i) {
    const auto& o = basis->occ(basis->fock_of(i));
    bool ok = true;
    if (nk >= 1 && o[0] != 0) ok = false;
    if (nk >= 2 && o[nk - 1] != 0) ok = false;
    if (ok) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> interior_states(const BasisPtr& basis) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < basis->dim(); ++i) {
    std::size_t f = basis->fock_of(i);
    if (basis->total_photons(f) <= basis->n_max() - 1 &&
        basis->field_energy(f) <= basis->e_max() - 1.0 + 1e-12)
      out.push_back(i);
  }
  return out;
}

}  // namespace srg
