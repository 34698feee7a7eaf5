#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

#include "srg/grid.hpp"

namespace srg {

using Complex = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;
using VecD = Eigen::VectorXd;

// Occupation-number basis over the momentum grid, truncated by total photon
// number and total field energy, tensored with n_p particle levels. Ordering:
// particle index major, then total photon number, then lexicographic
// occupations. The vacuum is the first state of each particle sector.
class TruncatedFockBasis {
 public:
  using Occ = std::vector<std::uint8_t>;

  static std::shared_ptr<const TruncatedFockBasis> build(const MomentumGrid& grid, int n_max,
                                                         double e_max, int n_p,
                                                         std::size_t dim_cap = 200000);

  const MomentumGrid& grid() const { return grid_; }
  int n_max() const { return n_max_; }
  double e_max() const { return e_max_; }
  int particle_dim() const { return n_p_; }

  std::size_t dim() const { return n_p_ * occs_.size(); }
  std::size_t fock_dim() const { return occs_.size(); }

  // global index = particle * fock_dim + fock index
  int particle_of(std::size_t idx) const { return static_cast<int>(idx / occs_.size()); }
  std::size_t fock_of(std::size_t idx) const { return idx % occs_.size(); }
  std::size_t index(int particle, std::size_t fock) const { return particle * occs_.size() + fock; }

  const Occ& occ(std::size_t fock) const { return occs_[fock]; }
  double field_energy(std::size_t fock) const { return energy_[fock]; }
  int total_photons(std::size_t fock) const { return totals_[fock]; }

  // fock index of an occupation vector, or -1 if outside the truncation
  long find(const Occ& o) const;

  bool same_as(const TruncatedFockBasis& o) const;

 private:
  MomentumGrid grid_;
  int n_max_ = 0;
  double e_max_ = 0.0;
  int n_p_ = 1;
  std::vector<Occ> occs_;
  std::vector<double> energy_;
  std::vector<int> totals_;
  std::vector<std::pair<Occ, std::size_t>> lookup_;  // sorted for find()
};

using BasisPtr = std::shared_ptr<const TruncatedFockBasis>;

// Dense operator on a TruncatedFockBasis.
struct FockOperator {
  BasisPtr basis;
  MatC mat;
  bool hermitian = false;

  FockOperator() = default;
  FockOperator(BasisPtr b, MatC m, bool herm = false);

  std::size_t dim() const { return basis ? basis->dim() : 0; }
  // max |M - M^dagger| relative to max |M|
  double hermiticity_defect() const;
  void assert_same_basis(const FockOperator& o) const;
};

enum class LadderKind { create, annihilate };

BasisPtr build_basis(const MomentumGrid& grid, int n_max, double e_max, int n_p,
                     std::size_t dim_cap = 200000);

// Discrete per-mode ladder operator A_i (unit CCR normalization); the
// continuum a(k_i) corresponds to A_i / sqrt(w_i). Transitions that leave the
// truncation are dropped. mode is 1-based.
FockOperator ladder_op(const BasisPtr& basis, int mode, LadderKind kind);

// Free field: diagonal with entries sum_i n_i k_i.
FockOperator build_hf(const BasisPtr& basis);

FockOperator identity_op(const BasisPtr& basis);

// Diagonal operator f(H_f) (x) 1 from a function of the field energy.
template <typename F>
FockOperator diagonal_of_energy(const BasisPtr& basis, F f) {
  MatC m = MatC::Zero(basis->dim(), basis->dim());
  for (std::size_t i = 0; i < basis->dim(); ++i)
    m(i, i) = f(basis->field_energy(basis->fock_of(i)));
  return FockOperator(basis, std::move(m), true);
}

// Indices of states whose occupations live entirely on modes 2..N_k-1 (both
//edge modes excluded) -- used for the dilation consistency checks.
std::vector<std::size_t> interior_mode_states(const BasisPtr& basis);

// Indices of states with room for one more photon in both the number and the
// energy truncation (field energy <= E_max - 1 covers any single mode).
std::vector<std::size_t> interior_states(const BasisPtr& basis);

}  // namespace srg
