#include "hma/pointwise.hpp"

#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

using namespace hma;

namespace {

HermitianMat diag2(double a, double b) {
  CMat m = CMat::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return HermitianMat(m);
}

HermitianMat random_pd(std::mt19937_64& rng, int n, double shift = 0.1) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Complex(normal(rng), normal(rng));
  return HermitianMat(CMat(a * a.adjoint() + shift * CMat::Identity(n, n)));
}

PointData diag_point(double l0, double l1, double psi = 1.0) {
  PointData p;
  p.g = HermitianMat::Identity(2);
  p.chi = HermitianMat::Zero(2);
  p.hess_u = diag2(l0, l1);
  p.psi = psi;
  return p;
}

}  // namespace

TEST_CASE("pointwise anchors for gtilde = diag(2, 1) against the euclidean metric") {
  const PointData p = diag_point(2.0, 1.0);

  const Pencil pen = point_pencil(p);
  CHECK(pen.lambda(0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(pen.lambda(1) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(admissibility_margin(p) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(is_admissible(p));

  // det = 2, trace = 3: residual log(4/3), exact-solution psi 4/3,
  // subsolution margin 2 - 3/2, cone margin (2 - psi) * lambda_min.
  CHECK(residual_point(p) == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-13));
  CHECK(equation_psi(p.g, p.chi, p.hess_u) == doctest::Approx(4.0 / 3.0).epsilon(1e-13));
  CHECK(subsolution_margin(p) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(cone_margin(p) == doctest::Approx(1.0).epsilon(1e-13));

  // F = gt^{-1} - g^{-1}/W = diag(1/2, 1) - I/3.
  const HermitianMat f = linearization_coeffs(p);
  CHECK(f.mat()(0, 0).real() == doctest::Approx(1.0 / 6.0).epsilon(1e-13));
  CHECK(f.mat()(1, 1).real() == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  CHECK(std::abs(f.mat()(0, 1)) < 1e-15);
  CHECK(herm_inner(f, p.g) == doctest::Approx(5.0 / 6.0).epsilon(1e-13));
  CHECK(herm_inner(f, p.gtilde()) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("residual rejects inadmissible points and nonpositive psi") {
  CHECK_FALSE(is_admissible(diag_point(2.0, -0.5)));
  CHECK_THROWS_AS(residual_point(diag_point(2.0, -0.5)), std::domain_error);
  CHECK_THROWS_AS(residual_point(diag_point(2.0, 0.0)), std::domain_error);
  CHECK_THROWS_AS(residual_point(diag_point(2.0, 1.0, 0.0)), std::domain_error);
  CHECK_THROWS_AS(residual_point(diag_point(2.0, 1.0, -1.0)), std::domain_error);
  CHECK_THROWS_AS(equation_psi(HermitianMat::Identity(2), HermitianMat::Zero(2), diag2(1.0, -1.0)),
                  std::domain_error);
}

TEST_CASE("residual of scaled euclidean quadratics is (n-1) log c") {
  for (int n : {2, 3}) {
    for (double c : {0.5, 1.0, 1.7}) {
      PointData p;
      p.g = HermitianMat::Identity(n);
      p.chi = HermitianMat::Zero(n);
      p.hess_u = HermitianMat(CMat(c * CMat::Identity(n, n)));
      p.psi = 1.0;
      CHECK(residual_point(p) == doctest::Approx((n - 1) * std::log(c)).epsilon(1e-13));
      CHECK(equation_psi(p.g, p.chi, p.hess_u) ==
            doctest::Approx(std::pow(c, n - 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("linearization coefficients are positive definite with trace identity") {
  std::mt19937_64 rng(41);
  for (int n : {2, 3, 4}) {
    for (int trial = 0; trial < 20; ++trial) {
      PointData p;
      p.g = random_pd(rng, n);
      p.chi = random_pd(rng, n);
      p.hess_u = random_pd(rng, n);
      p.psi = 1.0;
      REQUIRE(is_admissible(p));
      const HermitianMat f = linearization_coeffs(p);
      // Contraction with gtilde collapses to n - 1 identically.
      CHECK(herm_inner(f, p.gtilde()) == doctest::Approx(n - 1.0).epsilon(1e-10));
      // Positivity: F pairs positively with every rank-one Hermitian test form.
      const Pencil fp = pencil(f, HermitianMat::Identity(n));
      CHECK(fp.min() > 0.0);
    }
  }
}

TEST_CASE("wedge oracle: top coefficient equals n! det") {
  std::mt19937_64 rng(43);
  for (int n : {2, 3}) {
    const double fact = (n == 2) ? 2.0 : 6.0;
    CHECK(wedge_top_coefficient({CMat::Identity(n, n)}, {n}, n) ==
          doctest::Approx(fact).epsilon(1e-13));
    for (int trial = 0; trial < 10; ++trial) {
      const HermitianMat g = random_pd(rng, n);
      const double det = g.mat().determinant().real();
      CHECK(wedge_top_coefficient({g.mat()}, {n}, n) ==
            doctest::Approx(fact * det).epsilon(1e-11));
    }
  }
}

TEST_CASE("wedge oracle: mixed product reproduces the trace pairing") {
  // For n = 2: A ^ B / vol = per(A, B) and A ^ beta_pq picks out the
  // complementary entry; cross-check the codim-1 matrix against the cofactor
  // formula adj(A)^T for a random Hermitian A.
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 10; ++trial) {
    const HermitianMat a = random_pd(rng, 2);
    const HermitianMat h = wedge_codim1_matrix({a.mat()}, {1}, 2);
    // [A ^ beta_{p q}]/vol for n = 2 equals tr(A) delta_{pq} - A_{q p}.
    const CMat expect =
        a.mat().trace() * CMat::Identity(2, 2) - a.mat().transpose();
    CHECK((h.mat() - expect).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("eigenvalue margins agree with the wedge oracle") {
  std::mt19937_64 rng(53);
  for (int n : {2, 3}) {
    for (int trial = 0; trial < 25; ++trial) {
      const HermitianMat g = random_pd(rng, n);
      const HermitianMat gbar = random_pd(rng, n);
      const double psi = 0.3 + 1.5 * std::uniform_real_distribution<double>(0, 1)(rng);

      PointData p;
      p.g = g;
      p.chi = gbar;
      p.hess_u = HermitianMat::Zero(n);
      p.psi = psi;

      const double sub_eig = subsolution_margin(p);
      const double sub_wedge = subsolution_margin_wedge(g, gbar, psi);
      CHECK(sub_eig == doctest::Approx(sub_wedge).epsilon(1e-9));

      const double cone_eig = cone_margin(p);
      const double cone_wedge = cone_margin_wedge(g, gbar, psi);
      CHECK(cone_eig == doctest::Approx(cone_wedge).epsilon(1e-9));
    }
  }
}

TEST_CASE("concavity probe anchor and properties") {
  // n = 2: G(X) = det X / tr X.  G(diag(2,1)) = 2/3, G(diag(1,5)) = 5/6,
  // G(midpoint diag(1.5, 3)) = 1; probe = 1 - 3/4.
  CHECK(concavity_probe(diag2(2.0, 1.0), diag2(1.0, 5.0)) ==
        doctest::Approx(0.25).epsilon(1e-13));

  std::mt19937_64 rng(59);
  for (int n : {2, 3, 4}) {
    for (int trial = 0; trial < 50; ++trial) {
      const HermitianMat a = random_pd(rng, n);
      const HermitianMat b = random_pd(rng, n);
      const double probe = concavity_probe(a, b);
      CHECK(probe >= -1e-12);  // concavity of (det/tr)^{1/(n-1)}
      CHECK(concavity_probe(a, a) == doctest::Approx(0.0).epsilon(1e-13));
      // G is 1-homogeneous, so the probe scales linearly.
      const double t = 3.5;
      CHECK(concavity_probe(HermitianMat(CMat(t * a.mat())), HermitianMat(CMat(t * b.mat()))) ==
            doctest::Approx(t * probe).epsilon(1e-9));
    }
  }
}

TEST_CASE("strict concavity margin at a known solution/subsolution pair") {
  // sol: gtilde = diag(2, 2/3) satisfies det = tr * psi / n exactly for
  // psi = 1 (4/3 = (8/3)/2).  sub: gtilde = I.
  // F = diag(1/8, 9/8); F (gbar - gt) = 1/4; F g = 5/4.
  PointData sol = diag_point(2.0, 2.0 / 3.0);
  PointData sub = diag_point(1.0, 1.0);
  REQUIRE(std::abs(residual_point(sol)) < 1e-13);
  REQUIRE(cone_margin(sub) > 0.0);

  CHECK(lemma21_margin(sub, sol, 0.0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(lemma21_margin(sub, sol, 0.1) == doctest::Approx(0.025).epsilon(1e-10));
  CHECK(lemma21_margin(sub, sol, 1.0 / 9.0) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("assemble_gtilde adds the two curvature pieces") {
  std::mt19937_64 rng(61);
  const HermitianMat chi = random_pd(rng, 3);
  const HermitianMat hess = random_pd(rng, 3);
  const HermitianMat gt = assemble_gtilde(chi, hess);
  CHECK((gt.mat() - chi.mat() - hess.mat()).cwiseAbs().maxCoeff() < 1e-15);
}
