// Box-domain discretization: uniform tensor grids on axis-aligned boxes in
// R^{2n} ~ C^n, scalar fields sampled on them, second-order complex-Hessian
// stencils, gradient/Laplacian sup norms, and Dirichlet boundary handling.
//
// Conventions
//   * Real axes are ordered (x_1, y_1, ..., x_n, y_n): axis 2k is Re z_k,
//     axis 2k+1 is Im z_k.
//   * Storage is row-major with axis 0 slowest; every axis has the same node
//     count m (odd, >= 5) so the box center is a node.
//   * Interior nodes have every index in [1, m-2]; the rest are boundary.
#pragma once

#include "hma/analytic.hpp"
#include "hma/hermitian.hpp"
#include "hma/metric.hpp"

#include <functional>
#include <span>
#include <vector>

namespace hma {

// Samplers used to feed pointwise data onto grids: a scalar function of the
// real coordinates, and a Hermitian (1,1)-form field such as chi.
using PointFn = std::function<double(std::span<const double>)>;
using FormSampler = std::function<HermitianMat(std::span<const double>)>;

struct GridSpec {
  int n = 0;  // complex dimension (2n real axes)
  int m = 0;  // nodes per axis, odd and >= 5
  RVec lo, hi;

  // Validates and returns the spec; throws std::invalid_argument otherwise.
  static GridSpec make(int n, int m, RVec lo, RVec hi);

  int axes() const { return 2 * n; }
  long total() const;
  long interior_count() const;
  double h(int axis) const;
  long stride(int axis) const;

  long flatten(std::span<const int> idx) const;
  std::vector<int> unflatten(long flat) const;
  RVec point(std::span<const int> idx) const;
  RVec point_flat(long flat) const;
  bool is_interior(std::span<const int> idx) const;
  bool is_interior_flat(long flat) const;

  // Flat indices of all interior nodes, ascending.
  std::vector<long> interior_nodes() const;

  bool operator==(const GridSpec& o) const;
};

struct ScalarField {
  GridSpec spec;
  RVec values;

  static ScalarField zeros(const GridSpec& spec);
  static ScalarField sample(const GridSpec& spec, const PointFn& f);
  static ScalarField sample(const GridSpec& spec, const AnalyticScalar& f);

  double at(long flat) const { return values[flat]; }
  double& at(long flat) { return values[flat]; }
  bool all_finite() const;
};

// Complex Hessian u_{i jbar} at a strictly interior node via second-order
// central differences:
//   u_{i jbar} = 1/4 [ f_{x_i x_j} + f_{y_i y_j} + i (f_{x_i y_j} - f_{y_i x_j}) ],
// pure seconds (f_+ - 2 f_0 + f_-)/h^2, mixed by the 4-point cross stencil
// /(4 h_a h_b).  Exact on real quadratic polynomials; Hermitian by
// symmetrization after assembly.  Throws std::out_of_range on boundary nodes.
HermitianMat complex_hessian(const ScalarField& f, std::span<const int> idx);
HermitianMat complex_hessian_flat(const ScalarField& f, long flat);

enum class Region { All, Interior, Boundary };

// Sup over the region of the Euclidean norm of the first-difference gradient:
// central differences where the node has both axis neighbors, one-sided
// second-order (-3 f_0 + 4 f_1 - f_2)/(2h) along axes where it does not.
double gradient_sup(const ScalarField& f, Region region);

enum class BoundaryFill {
  Mask,             // boundary nodes get NaN
  NearestInterior,  // boundary nodes copy the value at the index-clamped
                    // nearest interior node
};

// W = tr_g(chi + Hess u) at every interior node; boundary per `fill`.
ScalarField w_field(const ScalarField& u, const FormSampler& chi, const MetricField& g,
                    BoundaryFill fill);

// Returns a copy of f with boundary nodes overwritten by phi(point);
// interior values untouched.  Idempotent.
ScalarField apply_dirichlet(const ScalarField& f, const PointFn& phi);

}  // namespace hma
