#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Eigenvalues>
#include <cmath>
#include <functional>

#include "doctest.h"
#include "srg/dilation.hpp"
#include "srg/fock.hpp"
#include "srg/rng.hpp"

using namespace srg;

namespace {

// independent enumeration oracle: count admissible occupation vectors
long count_occupations(const MomentumGrid& g, int n_max, double e_max) {
  long count = 0;
  std::function<void(int, int, double)> rec = [&](int mode, int used, double energy) {
    if (mode == g.n_modes) {
      ++count;
      return;
    }
    for (int n = 0; used + n <= n_max; ++n) {
      double e = energy + n * g.k[mode];
      if (e > e_max + 1e-12) break;
      rec(mode + 1, used + n, e);
    }
  };
  rec(0, 0, 0.0);
  return count;
}

}  // namespace

TEST_CASE("momentum grid geometry and quadrature") {
  auto g = MomentumGrid::make(0.5, 8);
  REQUIRE(g.k.size() == 8);
  CHECK(g.k.back() == 1.0);
  for (int i = 0; i + 1 < 8; ++i) {
    CHECK(g.k[i] < g.k[i + 1]);
    CHECK(g.k[i + 1] / g.k[i] == doctest::Approx(2.0).epsilon(1e-15));
  }
  double sum = 0.0;
  for (double w : g.w) {
    CHECK(w > 0.0);
    sum += w;
  }
  // log-midpoint rule integrates int_0^1 dk within 2 sigma relative error
  CHECK(std::abs(sum - 1.0) <= 2.0 * 0.5);
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("basis truncation and ordering") {
  SUBCASE("no photons allowed") {
    auto b = build_basis(MomentumGrid::make(0.5, 1), 0, 1.0, 1);
    CHECK(b->dim() == 1);
    CHECK(b->total_photons(0) == 0);
  }
  SUBCASE("two modes one photon") {
    auto b = build_basis(MomentumGrid::make(0.5, 2), 1, 2.0, 1);
    CHECK(b->dim() == 3);
    CHECK(b->field_energy(0) == 0.0);  // vacuum first
  }
  SUBCASE("default toy counted by the enumeration oracle") {
    auto g = MomentumGrid::make(0.5, 8);
    long oracle = count_occupations(g, 2, 2.0);
    auto b = build_basis(g, 2, 2.0, 2);
    CHECK(long(b->dim()) == 2 * oracle);
    CHECK(b->dim() == 90);  // frozen from the oracle
  }
  SUBCASE("vacuum present even when E_max blocks every photon") {
    auto b = build_basis(MomentumGrid::make(0.5, 3), 2, 1e-6, 1);
    CHECK(b->dim() == 1);
  }
  SUBCASE("canonical order: particle major, then photon number, then lex") {
    auto b = build_basis(MomentumGrid::make(0.5, 3), 2, 4.0, 2);
    for (std::size_t i = 0; i + 1 < b->fock_dim(); ++i) {
      int ta = b->total_photons(i), tb = b->total_photons(i + 1);
      CHECK(ta <= tb);
      if (ta == tb) CHECK(b->occ(i) < b->occ(i + 1));
    }
    CHECK(b->particle_of(b->fock_dim()) == 1);
  }
  SUBCASE("dimension cap enforced") {
    CHECK_THROWS_AS(build_basis(MomentumGrid::make(0.5, 8), 2, 2.0, 2, 50), std::runtime_error);
  }
}

TEST_CASE("ladder operators") {
  auto b = build_basis(MomentumGrid::make(0.5, 4), 2, 8.0, 1);

  SUBCASE("annihilation kills the vacuum") {
    for (int mode = 1; mode <= 4; ++mode) {
      auto a = ladder_op(b, mode, LadderKind::annihilate);
      VecC vac = VecC::Zero(b->dim());
      vac[0] = 1.0;
      CHECK((a.mat * vac).norm() == 0.0);
    }
  }
  SUBCASE("single quantum normalization") {
    auto a = ladder_op(b, 2, LadderKind::annihilate);
    auto ad = ladder_op(b, 2, LadderKind::create);
    VecC vac = VecC::Zero(b->dim());
    vac[0] = 1.0;
    Complex v = vac.adjoint() * (a.mat * (ad.mat * vac));
    CHECK(v.real() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(v.imag() == 0.0);
  }
  SUBCASE("adjointness is exact") {
    for (int mode = 1; mode <= 4; ++mode) {
      auto a = ladder_op(b, mode, LadderKind::annihilate);
      auto ad = ladder_op(b, mode, LadderKind::create);
      CHECK((ad.mat - a.mat.adjoint()).cwiseAbs().maxCoeff() == 0.0);
    }
  }
  SUBCASE("CCR on the interior subspace") {
    auto interior = interior_states(b);
    REQUIRE(!interior.empty());
    for (int i = 1; i <= 4; ++i)
      for (int j = 1; j <= 4; ++j) {
        auto ai = ladder_op(b, i, LadderKind::annihilate);
        auto adj = ladder_op(b, j, LadderKind::create);
        MatC comm = ai.mat * adj.mat - adj.mat * ai.mat;
        for (auto s : interior)
          for (auto t : interior) {
            Complex expected = (i == j && s == t) ? 1.0 : 0.0;
            CHECK(std::abs(comm(t, s) - expected) <= 2e-15);
          }
      }
  }
}

TEST_CASE("free field hamiltonian") {
  auto grid = MomentumGrid::make(0.5, 4);
  auto b = build_basis(grid, 2, 8.0, 1);
  auto hf = build_hf(b);
  CHECK(hf.hermitian);
  CHECK(hf.mat(0, 0) == Complex(0.0, 0.0));
  for (std::size_t s = 0; s < b->dim(); ++s) {
    double e = 0.0;
    for (int m = 0; m < 4; ++m) e += b->occ(s)[m] * grid.k[m];
    CHECK(hf.mat(s, s).real() == doctest::Approx(e).epsilon(1e-15));
    CHECK(hf.mat(s, s).real() >= 0.0);
  }
  // vacuum is the unique zero eigenvector at n_p = 1
  int zeros = 0;
  for (std::size_t s = 0; s < b->dim(); ++s)
    if (hf.mat(s, s).real() == 0.0) ++zeros;
  CHECK(zeros == 1);
}

TEST_CASE("dilation generator") {
  auto grid = MomentumGrid::make(0.5, 8);
  auto b = build_basis(grid, 2, 2.0, 1);
  auto B = build_dilation_b(b);

  SUBCASE("exactly self-adjoint, real spectrum") {
    CHECK((B.mat - B.mat.adjoint()).cwiseAbs().maxCoeff() <= 1e-15);
    Eigen::SelfAdjointEigenSolver<MatC> es(B.mat);
    CHECK(es.info() == Eigen::Success);
  }
  SUBCASE("vacuum expectation vanishes") { CHECK(std::abs(B.mat(0, 0)) == 0.0); }
  SUBCASE("one-photon block is i times a real antisymmetric matrix") {
    std::vector<std::size_t> onep;
    for (std::size_t s = 0; s < b->dim(); ++s)
      if (b->total_photons(s) == 1) onep.push_back(s);
    REQUIRE(onep.size() == 8);
    for (auto s : onep)
      for (auto t : onep) {
        Complex v = B.mat(t, s);
        CHECK(v.real() == 0.0);
        CHECK(B.mat(s, t).imag() == doctest::Approx(-v.imag()).epsilon(1e-15));
      }
  }
  SUBCASE("commutation with the free field on smooth interior states") {
    // the coarse default grid cannot do better than ~0.39 on fixed smooth
    // packets (frozen measurement); the relation emerges under refinement
    double defect = dilation_commutator_defect(b);
    CHECK(defect <= 0.45);
    double d07 = dilation_commutator_defect(build_basis(MomentumGrid::make(0.7, 15), 2, 2.0, 1));
    double d08 = dilation_commutator_defect(build_basis(MomentumGrid::make(0.8, 23), 2, 2.0, 1));
    double d09 = dilation_commutator_defect(build_basis(MomentumGrid::make(0.9, 47), 2, 2.0, 1));
    CHECK(d07 < defect);
    CHECK(d08 < d07);
    CHECK(d09 < d08);
    CHECK(d07 <= 0.05);
    CHECK(d09 <= 0.02);
  }
  SUBCASE("positive commutator convention") {
    // quadratic form of i[H_f,B] on a smooth one-photon packet is ~ +<H_f>
    auto hf = build_hf(b);
    Complex I(0, 1);
    MatC comm = I * (hf.mat * B.mat - B.mat * hf.mat);
    VecC psi = VecC::Zero(b->dim());
    for (std::size_t s = 0; s < b->dim(); ++s) {
      if (b->total_photons(s) != 1) continue;
      for (int m = 2; m < 6; ++m)
        if (b->occ(s)[m] == 1) psi[s] = 1.0;
    }
    psi /= psi.norm();
    double q = (psi.adjoint() * (comm * psi))(0, 0).real();
    double e = (psi.adjoint() * (hf.mat * psi))(0, 0).real();
    CHECK(q > 0.0);
    CHECK(q == doctest::Approx(e).epsilon(0.1));
  }
}

TEST_CASE("resolvent weight of the dilation generator") {
  auto b = build_basis(MomentumGrid::make(0.5, 6), 2, 2.0, 1);
  auto B = build_dilation_b(b);

  SUBCASE("functional calculus matches the eigenvalues") {
    double theta = 0.7;
    auto w = weight_b_theta(B, theta);
    Eigen::SelfAdjointEigenSolver<MatC> es(B.mat);
    MatC expected = MatC::Zero(b->dim(), b->dim());
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      double bv = es.eigenvalues()[i];
      expected += std::pow(1.0 + bv * bv, -theta / 2.0) * es.eigenvectors().col(i) *
                  es.eigenvectors().col(i).adjoint();
    }
    CHECK((w.mat - expected).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("vacuum sector weight is 1") {
    auto w = weight_b_theta(B, 1.0);
    CHECK(w.mat(0, 0).real() == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("norm bounded by one over random configurations") {
    Rng rng(20240901ull);
    for (int trial = 0; trial < 20; ++trial) {
      int nk = 3 + rng.uniform_int(0, 4);
      double sigma = rng.uniform(0.35, 0.75);
      double theta = rng.uniform(0.05, 1.0);
      auto bb = build_basis(MomentumGrid::make(sigma, nk), 2, 2.0, 1);
      auto ww = weight_b_theta(build_dilation_b(bb), theta);
      Eigen::SelfAdjointEigenSolver<MatC> es(ww.mat);
      CHECK(es.eigenvalues().maxCoeff() <= 1.0 + 1e-12);
      CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
  }
}

TEST_CASE("ad_B basics") {
  auto b = build_basis(MomentumGrid::make(0.5, 6), 2, 2.0, 1);
  auto B = build_dilation_b(b);
  CHECK(ad_b(B, identity_op(b)).mat.cwiseAbs().maxCoeff() == 0.0);
  CHECK(ad_b(B, B).mat.cwiseAbs().maxCoeff() == 0.0);
}
