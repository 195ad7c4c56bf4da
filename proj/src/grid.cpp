#include "hma/grid.hpp"

#include "hma/pointwise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace hma {

GridSpec GridSpec::make(int n, int m, RVec lo, RVec hi) {
  if (n < 1) throw std::invalid_argument("GridSpec: complex dimension must be >= 1");
  if (m < 5 || m % 2 == 0)
    throw std::invalid_argument("GridSpec: m must be odd and >= 5, got " + std::to_string(m));
  if (lo.size() != 2 * n || hi.size() != 2 * n)
    throw std::invalid_argument("GridSpec: lo/hi must have 2n components");
  for (int a = 0; a < 2 * n; ++a) {
    if (!(hi[a] > lo[a]))
      throw std::invalid_argument("GridSpec: need hi > lo on axis " + std::to_string(a));
  }
  GridSpec s;
  s.n = n;
  s.m = m;
  s.lo = std::move(lo);
  s.hi = std::move(hi);
  return s;
}

long GridSpec::total() const {
  long t = 1;
  for (int a = 0; a < axes(); ++a) t *= m;
  return t;
}

long GridSpec::interior_count() const {
  long t = 1;
  for (int a = 0; a < axes(); ++a) t *= (m - 2);
  return t;
}

double GridSpec::h(int axis) const { return (hi[axis] - lo[axis]) / (m - 1); }

long GridSpec::stride(int axis) const {
  long s = 1;
  for (int a = axis + 1; a < axes(); ++a) s *= m;
  return s;
}

long GridSpec::flatten(std::span<const int> idx) const {
  if (static_cast<int>(idx.size()) != axes())
    throw std::invalid_argument("GridSpec::flatten: index rank mismatch");
  long flat = 0;
  for (int a = 0; a < axes(); ++a) {
    if (idx[a] < 0 || idx[a] >= m)
      throw std::out_of_range("GridSpec::flatten: index out of range on axis " +
                              std::to_string(a));
    flat = flat * m + idx[a];
  }
  return flat;
}

std::vector<int> GridSpec::unflatten(long flat) const {
  if (flat < 0 || flat >= total()) throw std::out_of_range("GridSpec::unflatten: flat index");
  std::vector<int> idx(axes());
  for (int a = axes() - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % m);
    flat /= m;
  }
  return idx;
}

RVec GridSpec::point(std::span<const int> idx) const {
  RVec z(axes());
  for (int a = 0; a < axes(); ++a) z[a] = lo[a] + idx[a] * h(a);
  return z;
}

RVec GridSpec::point_flat(long flat) const {
  const std::vector<int> idx = unflatten(flat);
  return point(idx);
}

bool GridSpec::is_interior(std::span<const int> idx) const {
  for (int a = 0; a < axes(); ++a)
    if (idx[a] < 1 || idx[a] > m - 2) return false;
  return true;
}

bool GridSpec::is_interior_flat(long flat) const { return is_interior(unflatten(flat)); }

std::vector<long> GridSpec::interior_nodes() const {
  std::vector<long> out;
  out.reserve(interior_count());
  std::vector<int> idx(axes(), 1);
  while (true) {
    out.push_back(flatten(idx));
    int a = axes() - 1;
    for (; a >= 0; --a) {
      if (++idx[a] <= m - 2) break;
      idx[a] = 1;
    }
    if (a < 0) break;
  }
  return out;
}

bool GridSpec::operator==(const GridSpec& o) const {
  return n == o.n && m == o.m && lo == o.lo && hi == o.hi;
}

ScalarField ScalarField::zeros(const GridSpec& spec) {
  ScalarField f;
  f.spec = spec;
  f.values = RVec::Zero(spec.total());
  return f;
}

ScalarField ScalarField::sample(const GridSpec& spec, const PointFn& fn) {
  ScalarField f = zeros(spec);
  for (long i = 0; i < spec.total(); ++i) {
    const RVec z = spec.point_flat(i);
    f.values[i] = fn(std::span<const double>(z.data(), z.size()));
  }
  return f;
}

ScalarField ScalarField::sample(const GridSpec& spec, const AnalyticScalar& fn) {
  return sample(spec, [&fn](std::span<const double> z) { return fn.value(z); });
}

bool ScalarField::all_finite() const {
  for (long i = 0; i < values.size(); ++i)
    if (!std::isfinite(values[i])) return false;
  return true;
}

namespace {

// Pure second difference along axis a at flat index (assumed interior).
double d2_pure(const ScalarField& f, long flat, long sa, double ha) {
  return (f.values[flat + sa] - 2.0 * f.values[flat] + f.values[flat - sa]) / (ha * ha);
}

// Mixed second difference along distinct axes a, b (4-point cross).
double d2_mixed(const ScalarField& f, long flat, long sa, long sb, double ha, double hb) {
  return (f.values[flat + sa + sb] - f.values[flat + sa - sb] - f.values[flat - sa + sb] +
          f.values[flat - sa - sb]) /
         (4.0 * ha * hb);
}

double d2_real(const ScalarField& f, long flat, int a, int b) {
  const long sa = f.spec.stride(a);
  const double ha = f.spec.h(a);
  if (a == b) return d2_pure(f, flat, sa, ha);
  return d2_mixed(f, flat, sa, f.spec.stride(b), ha, f.spec.h(b));
}

}  // namespace

HermitianMat complex_hessian_flat(const ScalarField& f, long flat) {
  const GridSpec& spec = f.spec;
  if (!spec.is_interior_flat(flat))
    throw std::out_of_range("complex_hessian: node " + std::to_string(flat) +
                            " is on the boundary");
  const int n = spec.n;
  CMat h(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int xi = 2 * i, yi = 2 * i + 1, xj = 2 * j, yj = 2 * j + 1;
      const double re = d2_real(f, flat, xi, xj) + d2_real(f, flat, yi, yj);
      const double im = d2_real(f, flat, xi, yj) - d2_real(f, flat, yi, xj);
      h(i, j) = 0.25 * Complex(re, im);
    }
  }
  return HermitianMat::Symmetrized(h);
}

HermitianMat complex_hessian(const ScalarField& f, std::span<const int> idx) {
  return complex_hessian_flat(f, f.spec.flatten(idx));
}

namespace {

// First difference along one axis: central when both neighbors exist,
// one-sided second-order otherwise.
double d1_axis(const ScalarField& f, long flat, int ia, int a) {
  const GridSpec& spec = f.spec;
  const long s = spec.stride(a);
  const double h = spec.h(a);
  if (ia >= 1 && ia <= spec.m - 2)
    return (f.values[flat + s] - f.values[flat - s]) / (2.0 * h);
  if (ia == 0)
    return (-3.0 * f.values[flat] + 4.0 * f.values[flat + s] - f.values[flat + 2 * s]) /
           (2.0 * h);
  return (3.0 * f.values[flat] - 4.0 * f.values[flat - s] + f.values[flat - 2 * s]) / (2.0 * h);
}

}  // namespace

double gradient_sup(const ScalarField& f, Region region) {
  const GridSpec& spec = f.spec;
  double sup = 0.0;
  for (long flat = 0; flat < spec.total(); ++flat) {
    const std::vector<int> idx = spec.unflatten(flat);
    const bool interior = spec.is_interior(idx);
    if (region == Region::Interior && !interior) continue;
    if (region == Region::Boundary && interior) continue;
    double sq = 0.0;
    for (int a = 0; a < spec.axes(); ++a) {
      const double d = d1_axis(f, flat, idx[a], a);
      sq += d * d;
    }
    sup = std::max(sup, std::sqrt(sq));
  }
  return sup;
}

ScalarField w_field(const ScalarField& u, const FormSampler& chi, const MetricField& g,
                    BoundaryFill fill) {
  const GridSpec& spec = u.spec;
  if (g.n() != spec.n) throw std::invalid_argument("w_field: metric dimension mismatch");
  ScalarField w = ScalarField::zeros(spec);
  w.values.setConstant(std::numeric_limits<double>::quiet_NaN());
  for (long flat : spec.interior_nodes()) {
    const RVec z = spec.point_flat(flat);
    const std::span<const double> zs(z.data(), z.size());
    const HermitianMat gt = assemble_gtilde(chi(zs), complex_hessian_flat(u, flat));
    w.values[flat] = (g.at(zs).inverse().mat() * gt.mat()).trace().real();
  }
  if (fill == BoundaryFill::NearestInterior) {
    for (long flat = 0; flat < spec.total(); ++flat) {
      std::vector<int> idx = spec.unflatten(flat);
      if (spec.is_interior(idx)) continue;
      for (int a = 0; a < spec.axes(); ++a) idx[a] = std::clamp(idx[a], 1, spec.m - 2);
      w.values[flat] = w.values[spec.flatten(idx)];
    }
  }
  return w;
}

ScalarField apply_dirichlet(const ScalarField& f, const PointFn& phi) {
  ScalarField out = f;
  const GridSpec& spec = f.spec;
  for (long flat = 0; flat < spec.total(); ++flat) {
    if (spec.is_interior_flat(flat)) continue;
    const RVec z = spec.point_flat(flat);
    out.values[flat] = phi(std::span<const double>(z.data(), z.size()));
  }
  return out;
}

}  // namespace hma
