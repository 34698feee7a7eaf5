#include <cmath>
#include <functional>

#include "doctest.h"
#include "srg/assemble.hpp"
#include "srg/cutoff.hpp"
#include "srg/dilation.hpp"
#include "srg/kernel.hpp"
#include "srg/rng.hpp"

using namespace srg;

namespace {

KernelFamily base_family(const MomentumGrid& g, double mu = 0.5, int s = 2, double xi = 0.6) {
  return KernelFamily::free_field(g, mu, s, xi);
}

// random smooth kernel with controlled infrared behaviour ~ |k|^(mu+eta)
WickKernel random_kernel(Rng& rng, int m, int n, const KernelFamily& f, double amp = 1.0) {
  std::vector<double> rpts(f.rgrid.r.begin(), f.rgrid.r.begin() + f.rgrid.geom_count);
  WickKernel k = WickKernel::zero(m, n, rpts, f.grid.n_modes, f.grid.sigma);
  double eta = rng.uniform(0.0, 0.5);
  double c1 = rng.uniform(-1.0, 1.0), c2 = rng.uniform(-1.0, 1.0);
  double ph = rng.uniform(0.0, 0.3);
  auto kv = k.mode_points();
  for (std::size_t ir = 0; ir < k.r.size(); ++ir) {
    double r = k.r[ir];
    double smooth_r = 1.0 + 0.3 * c1 * r + 0.2 * c2 * r * r;
    for (int j1 = 0; j1 < k.n_modes; ++j1) {
      if (k.order() == 1) {
        double base = std::pow(kv[j1], f.mu + eta);
        k.at(ir, j1) = amp * Complex(base * smooth_r, ph * base * r);
      } else {
        for (int j2 = 0; j2 < k.n_modes; ++j2) {
          double base = std::pow(kv[j1] * kv[j2], f.mu + eta);
          k.at(ir, j1, j2) = amp * Complex(base * smooth_r, ph * base * r);
        }
      }
    }
  }
  k.symmetrize();
  return k;
}

}  // namespace

TEST_CASE("cutoff profile") {
  auto p = CutoffProfile::make();
  CHECK(CutoffProfile::chi(0.5) == 1.0);
  CHECK(CutoffProfile::chi(1.0) == 1.0);
  CHECK(CutoffProfile::chi(1.2) == 0.0);
  CHECK(CutoffProfile::chi(1.05) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p.sup_dchi <= 30.0);
  // width-1/10 ramps force sup|chi''| >= 400 (bang-bang bound); the honest
  // constant for the cos^2 ramp, frozen: (4/3)(1 + 5pi + 50pi^2 + 25pi^2)
  CHECK(p.sup_d2chi == doctest::Approx(50.0 * M_PI * M_PI).epsilon(1e-9));
  CHECK(p.c_chi == doctest::Approx((4.0 / 3.0) * (1.0 + 5.0 * M_PI + 50.0 * M_PI * M_PI +
                                                  25.0 * M_PI * M_PI))
                       .epsilon(1e-9));
  CHECK(p.c_chi == doctest::Approx(1009.2377).epsilon(1e-4));
  // scaled cutoff
  CHECK(CutoffProfile::chi_scaled(0.6, 0.5) == 0.0);
  CHECK(CutoffProfile::chi_scaled(0.5, 1.0) == 1.0);
}

TEST_CASE("r grid") {
  auto g = MomentumGrid::make(0.5, 8);
  auto rg = RGrid::make_for(g);
  CHECK(rg.r.front() == 0.0);
  CHECK(rg.exact_index(1.0) >= 0);
  CHECK(rg.r.back() >= 1.2);
  // every momentum point is an r point
  for (double k : g.k) CHECK(rg.exact_index(k) >= 0);
}

TEST_CASE("kernel norms") {
  auto g = MomentumGrid::make(0.5, 8);
  auto fam = base_family(g);
  std::vector<double> rpts(fam.rgrid.r.begin(), fam.rgrid.r.begin() + fam.rgrid.geom_count);

  SUBCASE("monomial |k|^mu has mu-norm one") {
    WickKernel k = WickKernel::zero(1, 0, rpts, 8, 0.5);
    for (std::size_t ir = 0; ir < k.r.size(); ++ir)
      for (int j = 0; j < 8; ++j) k.at(ir, j) = std::pow(g.k[j], fam.mu);
    CHECK(kernel_norm_mu(k, fam.mu) == doctest::Approx(1.0).epsilon(1e-13));
  }
  SUBCASE("w00(r) = r has mu,1 norm one") {
    KernelFamily f = fam;  // w00 = r already
    CHECK(w00_norm(f, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(f.w00_at(0.0)) == 0.0);
  }
  SUBCASE("family norm equals the hand-summed weighted norms") {
    Rng rng(7001);
    KernelFamily f = fam;
    f.kernels.push_back(random_kernel(rng, 1, 0, f));
    f.kernels.push_back(random_kernel(rng, 0, 1, f));
    f.kernels.push_back(random_kernel(rng, 1, 1, f));
    double expected = w00_norm(f, f.s);
    for (const auto& k : f.kernels)
      expected += std::pow(f.xi, -(k.m + k.n)) * kernel_norm_mu_s(k, f.mu, f.s);
    CHECK(family_norm_xi(f, f.mu, f.s, f.xi) == doctest::Approx(expected).epsilon(1e-13));
  }
  SUBCASE("norm monotonicity in the smoothness index") {
    Rng rng(7002);
    for (int t = 0; t < 5; ++t) {
      WickKernel k = random_kernel(rng, 1, 1, fam);
      double n0 = kernel_norm_mu_s(k, fam.mu, 0);
      double n1 = kernel_norm_mu_s(k, fam.mu, 1);
      double n2 = kernel_norm_mu_s(k, fam.mu, 2);
      CHECK(n0 <= n1 + 1e-14);
      CHECK(n1 <= n2 + 1e-14);
    }
  }
  SUBCASE("space nesting: smaller xi dominates") {
    Rng rng(7003);
    KernelFamily f = fam;
    f.kernels.push_back(random_kernel(rng, 1, 0, f));
    f.kernels.push_back(random_kernel(rng, 2, 0, f));
    double loose = interaction_norm_xi(f, f.mu, f.s, 0.6);
    double tight = interaction_norm_xi(f, f.mu, f.s, 0.3);
    CHECK(tight >= loose);
  }
  SUBCASE("constant kernel with mu > 0 is outside the space") {
    WickKernel k = WickKernel::zero(1, 0, rpts, 8, 0.5);
    for (std::size_t ir = 0; ir < k.r.size(); ++ir)
      for (int j = 0; j < 8; ++j) k.at(ir, j) = 1.0;
    // discrete grids keep it finite but the norm blows up as the infrared
    // cutoff deepens; check growth against a deeper grid
    double n8 = kernel_norm_mu(k, 0.5);
    auto g12 = MomentumGrid::make(0.5, 12);
    auto fam12 = base_family(g12);
    std::vector<double> rp12(fam12.rgrid.r.begin(), fam12.rgrid.r.begin() + fam12.rgrid.geom_count);
    WickKernel k12 = WickKernel::zero(1, 0, rp12, 12, 0.5);
    for (std::size_t ir = 0; ir < k12.r.size(); ++ir)
      for (int j = 0; j < 12; ++j) k12.at(ir, j) = 1.0;
    CHECK(kernel_norm_mu(k12, 0.5) > 3.0 * n8);
  }
}

TEST_CASE("family JSON round trip is bit exact") {
  Rng rng(7100);
  auto g = MomentumGrid::make(0.5, 6);
  KernelFamily f = base_family(g);
  f.kernels.push_back(random_kernel(rng, 1, 0, f));
  f.kernels.push_back(random_kernel(rng, 2, 0, f));
  for (auto& v : f.w00) v += Complex(rng.uniform(-1e-3, 1e-3), 0.0);
  std::string text = family_to_json(f);
  KernelFamily f2 = family_from_json(text);
  REQUIRE(f2.kernels.size() == f.kernels.size());
  for (std::size_t i = 0; i < f.w00.size(); ++i) {
    CHECK(f.w00[i].real() == f2.w00[i].real());
    CHECK(f.w00[i].imag() == f2.w00[i].imag());
  }
  for (std::size_t q = 0; q < f.kernels.size(); ++q)
    for (std::size_t i = 0; i < f.kernels[q].values.size(); ++i) {
      CHECK(f.kernels[q].values[i].real() == f2.kernels[q].values[i].real());
      CHECK(f.kernels[q].values[i].imag() == f2.kernels[q].values[i].imag());
    }
  CHECK(family_to_json(f2) == text);
}

TEST_CASE("assembly") {
  auto g = MomentumGrid::make(0.5, 8);
  auto basis = build_basis(g, 2, 2.0, 1);
  auto fam = base_family(g);

  SUBCASE("pure w00(r) = r reproduces the free field exactly") {
    FockOperator h = assemble_hamiltonian(fam, basis);
    FockOperator hf = build_hf(basis);
    CHECK((h.mat - hf.mat).cwiseAbs().maxCoeff() <= 1e-14);
  }
  SUBCASE("assembly is linear") {
    Rng rng(7200);
    KernelFamily f1 = fam, f2 = fam;
    f1.kernels.push_back(random_kernel(rng, 1, 0, f1));
    f2.kernels.push_back(random_kernel(rng, 1, 1, f2));
    KernelFamily fsum = fam;
    fsum.kernels.push_back(*f1.kernel(1, 0));
    fsum.kernels.push_back(*f2.kernel(1, 1));
    for (auto& v : fsum.kernels[0].values) v *= 2.0;
    for (auto& v : fsum.kernels[1].values) v *= -0.5;
    // w00 doubles too: 2*f1.w00 - 0.5*f2.w00 + ... keep w00 = r on all three
    MatC lhs = assemble_hamiltonian(fsum, basis).mat;
    MatC rhs = 2.0 * assemble_hamiltonian(f1, basis).mat -
               0.5 * assemble_hamiltonian(f2, basis).mat -
               0.5 * assemble_hamiltonian(fam, basis).mat;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("self-adjoint families assemble to hermitian operators") {
    Rng rng(7201);
    KernelFamily f = fam;
    WickKernel w10 = random_kernel(rng, 1, 0, f);
    WickKernel w01 = w10;
    w01.m = 0;
    w01.n = 1;
    for (auto& v : w01.values) v = std::conj(v);
    WickKernel w20 = random_kernel(rng, 2, 0, f);
    WickKernel w02 = w20;
    w02.m = 0;
    w02.n = 2;
    for (auto& v : w02.values) v = std::conj(v);
    f.kernels = {w10, w01, w20, w02};
    FockOperator h = assemble_hamiltonian(f, basis);
    CHECK(h.hermitian);
    CHECK(h.hermiticity_defect() <= 1e-13);
  }
}

TEST_CASE("wick bounds") {
  auto g = MomentumGrid::make(0.5, 8);
  auto basis = build_basis(g, 2, 2.0, 1);
  auto fam = base_family(g);
  std::vector<double> rpts(fam.rgrid.r.begin(), fam.rgrid.r.begin() + fam.rgrid.geom_count);

  SUBCASE("zero kernel gives zero on both sides") {
    WickKernel k = WickKernel::zero(1, 0, rpts, 8, 0.5);
    auto rep = wick_bound_check(k, fam.mu, 1.0, basis);
    CHECK(rep.lhs_weighted == 0.0);
    CHECK(rep.lhs_cut == 0.0);
  }
  SUBCASE("monomial at the unit scale") {
    WickKernel k = WickKernel::zero(1, 0, rpts, 8, 0.5);
    for (std::size_t ir = 0; ir < k.r.size(); ++ir)
      for (int j = 0; j < 8; ++j) k.at(ir, j) = std::pow(g.k[j], 0.5);
    auto rep = wick_bound_check(k, 0.5, 1.0, basis);
    // d=1 quadrature satisfies the cut bound within the (1+2 sigma) factor
    CHECK(rep.lhs_cut <= rep.rhs_cut * 2.0);
    CHECK(rep.lhs_weighted <= rep.rhs_weighted * 2.0);
  }
  SUBCASE("randomized audit at rho = 1") {
    Rng rng(7300);
    const double tol_factor = 2.0;  // 1 + 2 sigma at sigma = 1/2
    for (auto [m, n] : {std::pair{1, 0}, {0, 1}, {1, 1}, {2, 0}, {0, 2}}) {
      for (int t = 0; t < 10; ++t) {
        WickKernel k = random_kernel(rng, m, n, fam, rng.uniform(0.1, 2.0));
        auto rep = wick_bound_check(k, fam.mu, 1.0, basis);
        CHECK(rep.lhs_cut <= rep.rhs_cut * tol_factor);
      }
    }
  }
}

TEST_CASE("extraction inverts assembly at sampled coordinates") {
  auto g = MomentumGrid::make(0.5, 8);
  auto basis = build_basis(g, 2, 2.0, 1);
  auto fam = base_family(g);
  Rng rng(7400);

  SUBCASE("free field extracts to w00 = r") {
    FockOperator h = build_hf(basis);
    ExtractReport rep;
    KernelFamily f = extract_kernels(h, g, {}, &rep);
    CHECK(f.kernels.empty());
    for (std::size_t i = 0; i < f.rgrid.r.size(); ++i) {
      // beyond the largest reachable state energy the profile extrapolates
      if (f.rgrid.r[i] <= 2.0)
        CHECK(std::abs(f.w00[i] - Complex(f.rgrid.r[i], 0.0)) <= 1e-12);
    }
  }
  SUBCASE("scalar operator extracts to a constant") {
    FockOperator c = identity_op(basis);
    c.mat *= Complex(0.7, 0.0);
    KernelFamily f = extract_kernels(c, g);
    for (std::size_t i = 0; i < f.rgrid.r.size(); ++i)
      CHECK(std::abs(f.w00[i] - Complex(0.7, 0.0)) <= 1e-12);
    CHECK(f.kernels.empty());
  }
  SUBCASE("round trip on random families") {
    for (int trial = 0; trial < 5; ++trial) {
      KernelFamily f = fam;
      f.kernels.push_back(random_kernel(rng, 1, 0, f, 0.3));
      f.kernels.push_back(random_kernel(rng, 0, 1, f, 0.3));
      f.kernels.push_back(random_kernel(rng, 1, 1, f, 0.2));
      f.kernels.push_back(random_kernel(rng, 2, 0, f, 0.2));
      f.kernels.push_back(random_kernel(rng, 0, 2, f, 0.2));
      FockOperator h = assemble_hamiltonian(f, basis);
      KernelFamily f2 = extract_kernels(h, g);

      // cleanly identifiable coordinates reproduce within 1e-10:
      // w00 at r = 0, all (1,0)/(0,1) coordinates at sampled spectator
      // energies, (2,0)/(0,2) at r = 0, (1,1) off-diagonal pairs
      CHECK(std::abs(f2.w00_at(0.0) - f.w00_at(0.0)) <= 1e-10);
      for (auto [m, n] : {std::pair{1, 0}, {0, 1}}) {
        const WickKernel* a = f.kernel(m, n);
        const WickKernel* b2 = f2.kernel(m, n);
        REQUIRE(b2 != nullptr);
        for (int j = 0; j < 8; ++j) {
          // r = 0 and r = k_q samples with valid cutoff factors
          CHECK(std::abs(a->eval(0.0, j) - b2->eval(0.0, j)) <= 1e-10);
          for (int q = 0; q < 8; ++q) {
            double r = g.k[q];
            double et = r + g.k[j];
            if (CutoffProfile::chi(et) < 1e-3 || CutoffProfile::chi(r) < 1e-3) continue;
            CHECK(std::abs(a->eval(r, j) - b2->eval(r, j)) <= 1e-10);
          }
        }
      }
      for (auto [m, n] : {std::pair{2, 0}, {0, 2}}) {
        const WickKernel* a = f.kernel(m, n);
        const WickKernel* b2 = f2.kernel(m, n);
        REQUIRE(b2 != nullptr);
        for (int j1 = 0; j1 < 8; ++j1)
          for (int j2 = 0; j2 < 8; ++j2) {
            if (CutoffProfile::chi(g.k[j1] + g.k[j2]) < 1e-3) continue;
            CHECK(std::abs(a->eval(0.0, j1, j2) - b2->eval(0.0, j1, j2)) <= 1e-10);
          }
      }
      const WickKernel* a11 = f.kernel(1, 1);
      const WickKernel* b11 = f2.kernel(1, 1);
      REQUIRE(b11 != nullptr);
      for (int j1 = 0; j1 < 8; ++j1)
        for (int j2 = 0; j2 < 8; ++j2) {
          if (j1 == j2) continue;  // same-mode diagonal is a gauge convention
          if (CutoffProfile::chi(g.k[j1]) < 1e-3 || CutoffProfile::chi(g.k[j2]) < 1e-3) continue;
          CHECK(std::abs(a11->eval(0.0, j1, j2) - b11->eval(0.0, j1, j2)) <= 1e-10);
        }
      // operator-level reconstruction: exact at on-grid spectator energies,
      // linear r-interpolation error elsewhere (tracked, not zero)
      FockOperator h2 = assemble_hamiltonian(f2, basis);
      double scale = h.mat.cwiseAbs().maxCoeff();
      double worst_ongrid = 0.0, worst_any = 0.0;
      for (std::size_t a = 0; a < basis->dim(); ++a)
        for (std::size_t c = 0; c < basis->dim(); ++c) {
          double err = std::abs(h2.mat(a, c) - h.mat(a, c));
          worst_any = std::max(worst_any, err);
          bool ongrid_a = f.rgrid.exact_index(basis->field_energy(a)) >= 0;
          bool ongrid_c = f.rgrid.exact_index(basis->field_energy(c)) >= 0;
          if (a != c && ongrid_a && ongrid_c) worst_ongrid = std::max(worst_ongrid, err);
        }
      CHECK(worst_ongrid / scale <= 1e-10);
      CHECK(worst_any / scale <= 0.05);
    }
  }
}

TEST_CASE("ad_B of assembled monomials obeys the order-linear bound") {
  auto g = MomentumGrid::make(0.5, 8);
  auto basis = build_basis(g, 2, 2.0, 1);
  auto fam = base_family(g);
  auto B = build_dilation_b(basis);
  Rng rng(7500);

  // calibrate the constant once over a batch of random kernels, then verify
  // the bound c (m+n+1) ||w||_(mu,1) on a fresh batch
  auto measure = [&](int m, int n, int trials, double* cmax) {
    for (int t = 0; t < trials; ++t) {
      WickKernel k = random_kernel(rng, m, n, fam, rng.uniform(0.2, 1.5));
      FockOperator w = assemble_monomial(k, basis);
      double lhs = (B.mat * w.mat - w.mat * B.mat).cwiseAbs().maxCoeff();
      Eigen::BDCSVD<MatC> svd(B.mat * w.mat - w.mat * B.mat);
      lhs = svd.singularValues()(0);
      double rhs = (m + n + 1) * kernel_norm_mu_s(k, fam.mu, 1);
      *cmax = std::max(*cmax, lhs / rhs);
    }
  };
  double c_cal = 0.0;
  for (auto [m, n] : {std::pair{1, 0}, {0, 1}, {1, 1}, {2, 0}, {0, 2}})
    measure(m, n, 6, &c_cal);
  REQUIRE(c_cal > 0.0);
  double c_frozen = 1.25 * c_cal;
  double c_check = 0.0;
  for (auto [m, n] : {std::pair{1, 0}, {0, 1}, {1, 1}, {2, 0}, {0, 2}})
    measure(m, n, 6, &c_check);
  CHECK(c_check <= c_frozen);
}
