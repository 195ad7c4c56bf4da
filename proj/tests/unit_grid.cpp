#include "hma/grid.hpp"

#include "doctest.h"

#include <cmath>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

using namespace hma;

namespace {

GridSpec unit_box(int n, int m) {
  return GridSpec::make(n, m, RVec::Zero(2 * n), RVec::Ones(2 * n));
}

std::vector<int> center_idx(const GridSpec& spec) {
  return std::vector<int>(spec.axes(), (spec.m - 1) / 2);
}

std::span<const double> sp(const RVec& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace

TEST_CASE("grid spec validation") {
  CHECK_THROWS_AS(unit_box(0, 5), std::invalid_argument);
  CHECK_THROWS_AS(unit_box(2, 4), std::invalid_argument);   // even m
  CHECK_THROWS_AS(unit_box(2, 3), std::invalid_argument);   // too coarse
  CHECK_THROWS_AS(GridSpec::make(2, 5, RVec::Zero(3), RVec::Ones(4)), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec::make(2, 5, RVec::Ones(4), RVec::Zero(4)), std::invalid_argument);
  CHECK_NOTHROW(unit_box(1, 5));
}

TEST_CASE("grid layout anchors for n = 2, m = 5 on the unit box") {
  const GridSpec spec = unit_box(2, 5);
  CHECK(spec.axes() == 4);
  CHECK(spec.total() == 625);
  CHECK(spec.interior_count() == 81);  // 3^4
  for (int a = 0; a < 4; ++a) CHECK(spec.h(a) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(spec.stride(0) == 125);
  CHECK(spec.stride(1) == 25);
  CHECK(spec.stride(2) == 5);
  CHECK(spec.stride(3) == 1);

  const std::vector<int> idx = {1, 2, 3, 4};
  const long flat = spec.flatten(idx);
  CHECK(flat == 125 + 50 + 15 + 4);
  CHECK(spec.unflatten(flat) == idx);
  const RVec p = spec.point(idx);
  CHECK(p(0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(p(1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p(2) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(p(3) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_FALSE(spec.is_interior(idx));  // last index sits on the face
  CHECK(spec.is_interior(std::vector<int>{1, 2, 3, 3}));

  const std::vector<long> interior = spec.interior_nodes();
  CHECK(static_cast<long>(interior.size()) == spec.interior_count());
  for (size_t i = 1; i < interior.size(); ++i) CHECK(interior[i - 1] < interior[i]);
  for (long f : interior) CHECK(spec.is_interior_flat(f));
}

TEST_CASE("flatten and unflatten round trip") {
  const GridSpec spec = unit_box(2, 7);
  for (long f = 0; f < spec.total(); f += 13) {
    CHECK(spec.flatten(spec.unflatten(f)) == f);
  }
}

TEST_CASE("hessian stencil is exact on real quadratics") {
  const GridSpec spec = unit_box(2, 5);
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::Matrix4d q;
    for (int a = 0; a < 4; ++a)
      for (int b = a; b < 4; ++b) q(a, b) = q(b, a) = unif(rng);
    RVec lin = RVec::NullaryExpr(4, [&](Eigen::Index) { return unif(rng); });

    const ScalarField f = ScalarField::sample(spec, [&](std::span<const double> z) {
      Eigen::Map<const Eigen::Vector4d> x(z.data());
      return double(x.dot(q * x) + lin.dot(x));
    });

    // Analytic complex Hessian of x^T Q x: second derivatives are 2 Q.
    CMat expect(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        expect(i, j) = 0.25 * Complex(2 * q(2 * i, 2 * j) + 2 * q(2 * i + 1, 2 * j + 1),
                                      2 * q(2 * i, 2 * j + 1) - 2 * q(2 * i + 1, 2 * j));

    for (const std::vector<int>& idx :
         {std::vector<int>{1, 1, 1, 1}, center_idx(spec), std::vector<int>{3, 2, 1, 3}}) {
      const HermitianMat h = complex_hessian(f, idx);
      CHECK((h.mat() - expect).cwiseAbs().maxCoeff() < 1e-11);
    }
  }
}

TEST_CASE("hessian stencil anchors for simple monomials") {
  const GridSpec spec = unit_box(2, 5);
  const auto at_center = [&](const char* family) {
    const AnalyticPtr f = make_analytic(family, {}, 4);
    return complex_hessian(ScalarField::sample(spec, *f), center_idx(spec));
  };
  // x_1 x_2: only the 1/4 f_{x_1 x_2} cross term survives.
  const HermitianMat hb = at_center("bilinear-x");
  CHECK(std::abs(hb.mat()(0, 1) - Complex(0.25, 0.0)) < 1e-12);
  CHECK(std::abs(hb.mat()(0, 0)) < 1e-12);
  CHECK(std::abs(hb.mat()(1, 1)) < 1e-12);

  // c |z|^2 gives exactly c I at interior nodes.
  const AnalyticPtr q = make_analytic("quad-psh", {0.7}, 4);
  const ScalarField fq = ScalarField::sample(spec, *q);
  for (long flat : spec.interior_nodes()) {
    const HermitianMat h = complex_hessian_flat(fq, flat);
    CHECK((h.mat() - 0.7 * CMat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("hessian stencil refuses boundary nodes") {
  const GridSpec spec = unit_box(2, 5);
  const ScalarField f = ScalarField::zeros(spec);
  CHECK_THROWS_AS(complex_hessian(f, std::vector<int>{0, 2, 2, 2}), std::out_of_range);
  CHECK_THROWS_AS(complex_hessian(f, std::vector<int>{2, 2, 2, 4}), std::out_of_range);
  CHECK_NOTHROW(complex_hessian(f, std::vector<int>{1, 1, 3, 3}));
}

TEST_CASE("hessian stencil error decays at second order") {
  const AnalyticPtr f = make_analytic("exp-cos", {0.9, 1.3}, 4);
  double errs[2];
  const int ms[2] = {9, 17};
  for (int k = 0; k < 2; ++k) {
    const GridSpec spec = unit_box(2, ms[k]);
    const ScalarField sf = ScalarField::sample(spec, *f);
    const std::vector<int> c = center_idx(spec);
    const HermitianMat num = complex_hessian(sf, c);
    const RVec zc = spec.point(c);
    const HermitianMat exact = f->complex_hessian(sp(zc));
    errs[k] = (num.mat() - exact.mat()).cwiseAbs().maxCoeff();
  }
  // Halving h divides the error by about 4.
  const double ratio = errs[0] / errs[1];
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
}

TEST_CASE("gradient sup norms") {
  const GridSpec spec = unit_box(2, 5);

  const ScalarField constant =
      ScalarField::sample(spec, [](std::span<const double>) { return 3.0; });
  CHECK(gradient_sup(constant, Region::All) == 0.0);

  const ScalarField linear =
      ScalarField::sample(spec, [](std::span<const double> z) { return z[0]; });
  CHECK(gradient_sup(linear, Region::All) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(gradient_sup(linear, Region::Interior) == doctest::Approx(1.0).epsilon(1e-13));

  // f = x_1^2 on [0,1]: gradient 2x, attained at the x_1 = 1 face; both the
  // central and the one-sided second-order stencils are exact on quadratics,
  // and the largest interior coordinate is 1 - h.
  const ScalarField quad =
      ScalarField::sample(spec, [](std::span<const double> z) { return z[0] * z[0]; });
  CHECK(gradient_sup(quad, Region::All) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(gradient_sup(quad, Region::Boundary) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(gradient_sup(quad, Region::Interior) == doctest::Approx(1.5).epsilon(1e-13));
}

TEST_CASE("w_field matches the pointwise trace") {
  const GridSpec spec = unit_box(2, 5);
  const MetricPtr g = make_builtin_metric("conformal-exp", {0.6}, 2);
  const AnalyticPtr u_fn = make_analytic("quad-smooth", {0.2}, 4);
  const ScalarField u = ScalarField::sample(spec, *u_fn);
  const FormSampler chi = [](std::span<const double>) {
    CMat m = CMat::Identity(2, 2);
    m(0, 1) = m(1, 0) = 0.25;
    return HermitianMat(m);
  };

  const ScalarField w = w_field(u, chi, *g, BoundaryFill::Mask);
  for (long flat : spec.interior_nodes()) {
    const RVec z = spec.point_flat(flat);
    const HermitianMat gt = chi(sp(z)) + complex_hessian_flat(u, flat);
    const double expect = (g->at(sp(z)).inverse().mat() * gt.mat()).trace().real();
    CHECK(w.at(flat) == doctest::Approx(expect).epsilon(1e-13));
  }

  // Mask fills the boundary with NaN; NearestInterior clamps the index.
  CHECK_FALSE(w.all_finite());
  CHECK(std::isnan(w.at(0)));

  const ScalarField wn = w_field(u, chi, *g, BoundaryFill::NearestInterior);
  CHECK(wn.all_finite());
  const long corner = spec.flatten(std::vector<int>{0, 0, 0, 0});
  const long clamped = spec.flatten(std::vector<int>{1, 1, 1, 1});
  CHECK(wn.at(corner) == wn.at(clamped));
  for (long flat : spec.interior_nodes()) CHECK(wn.at(flat) == w.at(flat));
}

TEST_CASE("apply_dirichlet overwrites only the boundary and is idempotent") {
  const GridSpec spec = unit_box(2, 5);
  const ScalarField f =
      ScalarField::sample(spec, [](std::span<const double> z) { return z[0] - z[3]; });
  const PointFn phi = [](std::span<const double> z) { return 10.0 + z[1]; };

  const ScalarField g1 = apply_dirichlet(f, phi);
  for (long flat = 0; flat < spec.total(); ++flat) {
    const RVec z = spec.point_flat(flat);
    if (spec.is_interior_flat(flat)) {
      CHECK(g1.at(flat) == f.at(flat));
    } else {
      CHECK(g1.at(flat) == doctest::Approx(10.0 + z(1)).epsilon(1e-15));
    }
  }
  const ScalarField g2 = apply_dirichlet(g1, phi);
  for (long flat = 0; flat < spec.total(); ++flat) CHECK(g2.at(flat) == g1.at(flat));
}
