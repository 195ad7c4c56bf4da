#pragma once

// Closed-form scalar functions on R^{2n} with analytic partial derivatives up
// to third order.  These supply exact solutions for manufactured problems,
// subsolution seeds, and the test-function family for the covariant-derivative
// commutation checks.  Real coordinates are ordered (x_1, y_1, ..., x_n, y_n),
// z_j = x_j + i y_j.

#include "hma/hermitian.hpp"

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace hma {

class AnalyticScalar {
 public:
  virtual ~AnalyticScalar() = default;

  virtual int dims() const = 0;  // number of real coordinates (2n)
  virtual double value(std::span<const double> z) const = 0;
  virtual double d1(std::span<const double> z, int a) const = 0;
  virtual double d2(std::span<const double> z, int a, int b) const = 0;
  virtual double d3(std::span<const double> z, int a, int b, int c) const = 0;

  // dv/dz_i = (d/dx_i - i d/dy_i)/2 applied to v.
  Complex dz(std::span<const double> z, int i) const;
  // v_{i j-bar} = [v_{x_i x_j} + v_{y_i y_j} + i(v_{x_i y_j} - v_{y_i x_j})]/4.
  HermitianMat complex_hessian(std::span<const double> z) const;
  // d/dz_k of v_{i j-bar} (needs third derivatives).
  Complex hessian_dz(std::span<const double> z, int i, int j, int k) const;
};

using AnalyticPtr = std::shared_ptr<const AnalyticScalar>;

// Known families (dims = 2n):
//   quad-psh      params [c]                      c * |z|^2
//   quad-diag     params [q_0..q_{2n-1}]          sum q_a xi_a^2
//   quad-smooth   params [a]                      |z|^2 + a e^{x_1} cos(y_1)
//   bump-quartic  params [c, lo_0, hi_0, ...]     |z|^2 - c prod (xi_a - lo_a)(hi_a - xi_a)
//   bilinear-x    params []                       x_1 x_2
//   cubic-mix     params []                       x_1^2 y_1 + x_2^2 y_2
//   exp-cos       params [alpha, beta]            e^{alpha x_1} cos(beta y_2)
AnalyticPtr make_analytic(const std::string& name, const std::vector<double>& params, int dims);

}  // namespace hma
