#include "hma/lemma_mc.hpp"

#include "hma/pointwise.hpp"

#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>

using namespace hma;

TEST_CASE("random_unitary is unitary") {
  std::mt19937_64 rng(3);
  for (int n : {2, 3, 4}) {
    for (int trial = 0; trial < 10; ++trial) {
      const CMat u = random_unitary(rng, n);
      CHECK((u * u.adjoint() - CMat::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("random_pd is Hermitian with eigenvalues in range") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const HermitianMat a = random_pd(rng, 3, 0.5, 4.0);
    const Pencil p = pencil(a, HermitianMat::Identity(3));
    CHECK(p.min() >= 0.5 * (1 - 1e-12));
    CHECK(p.max() <= 4.0 * (1 + 1e-12));
  }
}

TEST_CASE("calibrated runs are deterministic and violation-free") {
  LemmaMcOptions opt;
  opt.n = 2;
  opt.epsilon = 0.5;
  opt.samples = 2000;
  opt.pilot = 1000;
  opt.seed = 999;

  const LemmaMcResult first = lemma21_monte_carlo(opt);
  CHECK(first.violations == 0);
  CHECK(first.samples == opt.samples);
  CHECK(first.theta_star > 0.0);
  CHECK(first.min_ratio >= first.theta_star);

  const LemmaMcResult second = lemma21_monte_carlo(opt);
  CHECK(second.theta_star == first.theta_star);
  CHECK(second.n_star == first.n_star);
  CHECK(second.violations == first.violations);
  CHECK(second.min_ratio == first.min_ratio);
}

TEST_CASE("forcing theta above the feasible band yields violations") {
  LemmaMcOptions opt;
  opt.n = 2;
  opt.epsilon = 0.5;
  opt.samples = 2000;
  opt.seed = 12345;
  opt.force_theta = 0.5;  // far above the calibrated ~0.1 band

  const LemmaMcResult res = lemma21_monte_carlo(opt);
  CHECK(res.theta_star == 0.5);
  CHECK(res.n_star == 10.0);  // unset partner default
  CHECK(res.violations > 0);
}

TEST_CASE("forcing the W threshold is honored without calibration") {
  LemmaMcOptions opt;
  opt.n = 2;
  opt.epsilon = 0.5;
  opt.samples = 1000;
  opt.seed = 7;
  opt.force_n = 100.0;

  const LemmaMcResult res = lemma21_monte_carlo(opt);
  CHECK(res.theta_star == 0.0);  // unset partner default
  CHECK(res.n_star == 100.0);
  CHECK(res.violations == 0);  // theta = 0 margins are nonnegative at solutions
  CHECK(res.samples == opt.samples);
}

TEST_CASE("degenerate pinching epsilon = 1 collapses gbar to the metric") {
  LemmaMcOptions opt;
  opt.n = 2;
  opt.epsilon = 1.0;
  opt.samples = 500;
  opt.pilot = 500;
  opt.seed = 31;

  const LemmaMcResult res = lemma21_monte_carlo(opt);
  CHECK(res.violations == 0);
  CHECK(res.theta_star > 0.0);
}

TEST_CASE("option validation") {
  LemmaMcOptions opt;
  opt.n = 1;
  CHECK_THROWS_AS(lemma21_monte_carlo(opt), std::invalid_argument);
  opt.n = 2;
  opt.epsilon = 1.5;
  CHECK_THROWS_AS(lemma21_monte_carlo(opt), std::invalid_argument);
  opt.epsilon = 0.0;
  CHECK_THROWS_AS(lemma21_monte_carlo(opt), std::invalid_argument);
  opt.epsilon = 0.5;
  opt.sup_psi = 1e-3;  // below the sampling floor
  CHECK_THROWS_AS(lemma21_monte_carlo(opt), std::invalid_argument);
  opt.sup_psi = 1.0;
  opt.samples = 0;
  CHECK_THROWS_AS(lemma21_monte_carlo(opt), std::invalid_argument);
  opt.samples = 100;
  opt.force_theta = -0.1;
  CHECK_THROWS_AS(lemma21_monte_carlo(opt), std::invalid_argument);
  opt.force_theta = std::numeric_limits<double>::quiet_NaN();
  opt.force_n = -1.0;
  CHECK_THROWS_AS(lemma21_monte_carlo(opt), std::invalid_argument);
}

TEST_CASE("strict-concavity margin is frame invariant") {
  // The Monte-Carlo sampler works in the frame g = I; rotating all three
  // tensors by the same unitary must leave the margin unchanged, which is what
  // makes that frame choice lossless.
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(trial % 3);
    const HermitianMat gbar = random_pd(rng, n, 0.95, 1.05);

    // Build an equation-satisfying gt with psi near 1: psi scales as t^{n-1}
    // under gt -> t gt, so rescale a random draw accordingly.
    HermitianMat gt = random_pd(rng, n, 0.5, 2.0);
    const double psi0 = equation_psi(HermitianMat::Identity(n), HermitianMat::Zero(n), gt);
    gt = std::pow(psi0, -1.0 / (n - 1)) * gt;
    const double psi = equation_psi(HermitianMat::Identity(n), HermitianMat::Zero(n), gt);

    PointData sol;
    sol.g = HermitianMat::Identity(n);
    sol.chi = HermitianMat::Zero(n);
    sol.hess_u = gt;
    sol.psi = psi;
    PointData sub = sol;
    sub.hess_u = gbar;
    REQUIRE(cone_margin(sub) > 0.0);

    const double theta = 0.05;
    const double base = lemma21_margin(sub, sol, theta);

    const CMat u = random_unitary(rng, n);
    auto rotate = [&](const HermitianMat& m) {
      return HermitianMat::Symmetrized(u * m.mat() * u.adjoint());
    };
    PointData rsol;
    rsol.g = rotate(sol.g);
    rsol.chi = HermitianMat::Zero(n);
    rsol.hess_u = rotate(gt);
    rsol.psi = psi;
    PointData rsub = rsol;
    rsub.hess_u = rotate(gbar);

    CHECK(lemma21_margin(rsub, rsol, theta) == doctest::Approx(base).epsilon(1e-10));
  }
}
