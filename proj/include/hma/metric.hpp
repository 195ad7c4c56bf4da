#pragma once

// Hermitian background metrics g_{i j-bar}(z) on C^n with analytic coordinate
// derivatives.  Derivatives are supplied per real coordinate axis; complex
// derivatives are assembled from them.  Finite differences appear only in
// tests, as an independent oracle.

#include "hma/hermitian.hpp"

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace hma {

class MetricField {
 public:
  virtual ~MetricField() = default;

  virtual int n() const = 0;
  virtual const std::string& name() const = 0;
  virtual const std::vector<double>& params() const = 0;

  // Metric value and real-coordinate derivatives at z (2n real coordinates).
  virtual CMat g(std::span<const double> z) const = 0;
  virtual CMat dg(std::span<const double> z, int a) const = 0;
  virtual CMat ddg(std::span<const double> z, int a, int b) const = 0;

  // d/dz_i g = (dg/dx_i - i dg/dy_i)/2.
  CMat dg_z(std::span<const double> z, int i) const;
  // d/dz_i d/dzbar_j g.
  CMat ddg_zzbar(std::span<const double> z, int i, int j) const;
  // Checked Hermitian value.
  HermitianMat at(std::span<const double> z) const;
};

using MetricPtr = std::shared_ptr<const MetricField>;

// Built-in families:
//   euclidean         params []               g = I (Kahler, flat)
//   conformal-exp     params [a]              g = e^{a x_1} I (torsion-bearing for a != 0)
//   diag-anisotropic  params [a_1..a_n, b]    g_kk = 1 + a_k sin(b x_k), needs |a_k| < 1
MetricPtr make_builtin_metric(const std::string& name, const std::vector<double>& params, int n);

// Names accepted by make_builtin_metric.
const std::vector<std::string>& builtin_metric_names();

}  // namespace hma
