#include "hma/analytic.hpp"

#include <cmath>
#include <stdexcept>

namespace hma {

Complex AnalyticScalar::dz(std::span<const double> z, int i) const {
  return 0.5 * Complex(d1(z, 2 * i), -d1(z, 2 * i + 1));
}

HermitianMat AnalyticScalar::complex_hessian(std::span<const double> z) const {
  const int n = dims() / 2;
  CMat h(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double re = d2(z, 2 * i, 2 * j) + d2(z, 2 * i + 1, 2 * j + 1);
      const double im = d2(z, 2 * i, 2 * j + 1) - d2(z, 2 * i + 1, 2 * j);
      h(i, j) = 0.25 * Complex(re, im);
      h(j, i) = std::conj(h(i, j));
    }
  }
  return HermitianMat(h);
}

Complex AnalyticScalar::hessian_dz(std::span<const double> z, int i, int j, int k) const {
  auto hess_d = [&](int axis) {
    const double re = d3(z, 2 * i, 2 * j, axis) + d3(z, 2 * i + 1, 2 * j + 1, axis);
    const double im = d3(z, 2 * i, 2 * j + 1, axis) - d3(z, 2 * i + 1, 2 * j, axis);
    return 0.25 * Complex(re, im);
  };
  return 0.5 * (hess_d(2 * k) - Complex(0, 1) * hess_d(2 * k + 1));
}

namespace {

// q-th derivative of cos evaluated through the 4-cycle cos, -sin, -cos, sin.
double cos_deriv(int q, double t) {
  switch (q & 3) {
    case 0: return std::cos(t);
    case 1: return -std::sin(t);
    case 2: return -std::cos(t);
    default: return std::sin(t);
  }
}

class QuadDiag : public AnalyticScalar {
 public:
  QuadDiag(std::vector<double> q) : q_(std::move(q)) {}
  int dims() const override { return static_cast<int>(q_.size()); }
  double value(std::span<const double> z) const override {
    double s = 0;
    for (size_t a = 0; a < q_.size(); ++a) s += q_[a] * z[a] * z[a];
    return s;
  }
  double d1(std::span<const double> z, int a) const override { return 2.0 * q_[a] * z[a]; }
  double d2(std::span<const double>, int a, int b) const override {
    return a == b ? 2.0 * q_[a] : 0.0;
  }
  double d3(std::span<const double>, int, int, int) const override { return 0.0; }

 private:
  std::vector<double> q_;
};

class QuadSmooth : public AnalyticScalar {
 public:
  QuadSmooth(double a, int dims) : a_(a), dims_(dims) {}
  int dims() const override { return dims_; }
  double value(std::span<const double> z) const override {
    double s = 0;
    for (int a = 0; a < dims_; ++a) s += z[a] * z[a];
    return s + a_ * std::exp(z[0]) * std::cos(z[1]);
  }
  double d1(std::span<const double> z, int a) const override {
    double s = 2.0 * z[a];
    if (a == 0) s += a_ * std::exp(z[0]) * std::cos(z[1]);
    if (a == 1) s -= a_ * std::exp(z[0]) * std::sin(z[1]);
    return s;
  }
  double d2(std::span<const double> z, int a, int b) const override {
    double s = (a == b) ? 2.0 : 0.0;
    return s + term(z, count(a, b, -1, 0), count(a, b, -1, 1), a, b, -1);
  }
  double d3(std::span<const double> z, int a, int b, int c) const override {
    return term(z, count(a, b, c, 0), count(a, b, c, 1), a, b, c);
  }

 private:
  static int count(int a, int b, int c, int axis) {
    return (a == axis) + (b == axis) + (c == axis);
  }
  // Derivative of a_ e^{x1} cos(y1); zero if any axis outside {0,1} appears.
  double term(std::span<const double> z, int p, int q, int a, int b, int c) const {
    const int named = (a >= 0 ? 1 : 0) + (b >= 0 ? 1 : 0) + (c >= 0 ? 1 : 0);
    if (p + q != named) return 0.0;
    return a_ * std::exp(z[0]) * cos_deriv(q, z[1]);
  }
  double a_;
  int dims_;
};

class BumpQuartic : public AnalyticScalar {
 public:
  BumpQuartic(double c, std::vector<double> lo, std::vector<double> hi)
      : c_(c), lo_(std::move(lo)), hi_(std::move(hi)) {}
  int dims() const override { return static_cast<int>(lo_.size()); }
  double value(std::span<const double> z) const override {
    double quad = 0;
    for (size_t a = 0; a < lo_.size(); ++a) quad += z[a] * z[a];
    return quad - c_ * product(z, {});
  }
  double d1(std::span<const double> z, int a) const override {
    return 2.0 * z[a] - c_ * product(z, {a});
  }
  double d2(std::span<const double> z, int a, int b) const override {
    return (a == b ? 2.0 : 0.0) - c_ * product(z, {a, b});
  }
  double d3(std::span<const double> z, int a, int b, int c) const override {
    return -c_ * product(z, {a, b, c});
  }

 private:
  // prod_a f_a with f_a(t) = (t - lo_a)(hi_a - t), differentiated per the
  // multiplicity of each axis in `der` (each factor is quadratic).
  double product(std::span<const double> z, std::initializer_list<int> der) const {
    double p = 1.0;
    for (size_t a = 0; a < lo_.size(); ++a) {
      int mult = 0;
      for (int d : der) mult += (d == static_cast<int>(a));
      const double t = z[a];
      switch (mult) {
        case 0: p *= (t - lo_[a]) * (hi_[a] - t); break;
        case 1: p *= lo_[a] + hi_[a] - 2.0 * t; break;
        case 2: p *= -2.0; break;
        default: return 0.0;
      }
    }
    return p;
  }
  double c_;
  std::vector<double> lo_, hi_;
};

class BilinearX : public AnalyticScalar {
 public:
  explicit BilinearX(int dims) : dims_(dims) {}
  int dims() const override { return dims_; }
  double value(std::span<const double> z) const override { return z[0] * z[2]; }
  double d1(std::span<const double> z, int a) const override {
    if (a == 0) return z[2];
    if (a == 2) return z[0];
    return 0.0;
  }
  double d2(std::span<const double>, int a, int b) const override {
    return ((a == 0 && b == 2) || (a == 2 && b == 0)) ? 1.0 : 0.0;
  }
  double d3(std::span<const double>, int, int, int) const override { return 0.0; }

 private:
  int dims_;
};

class CubicMix : public AnalyticScalar {
 public:
  explicit CubicMix(int dims) : dims_(dims) {}
  int dims() const override { return dims_; }
  double value(std::span<const double> z) const override {
    return z[0] * z[0] * z[1] + z[2] * z[2] * z[3];
  }
  double d1(std::span<const double> z, int a) const override {
    switch (a) {
      case 0: return 2.0 * z[0] * z[1];
      case 1: return z[0] * z[0];
      case 2: return 2.0 * z[2] * z[3];
      case 3: return z[2] * z[2];
      default: return 0.0;
    }
  }
  double d2(std::span<const double> z, int a, int b) const override {
    auto pair = [&](int p, int q, double v) {
      return ((a == p && b == q) || (a == q && b == p)) ? v : 0.0;
    };
    if (a == 0 && b == 0) return 2.0 * z[1];
    if (a == 2 && b == 2) return 2.0 * z[3];
    return pair(0, 1, 2.0 * z[0]) + pair(2, 3, 2.0 * z[2]);
  }
  double d3(std::span<const double>, int a, int b, int c) const override {
    int c0 = (a == 0) + (b == 0) + (c == 0);
    int c1 = (a == 1) + (b == 1) + (c == 1);
    int c2 = (a == 2) + (b == 2) + (c == 2);
    int c3 = (a == 3) + (b == 3) + (c == 3);
    if (c0 == 2 && c1 == 1) return 2.0;
    if (c2 == 2 && c3 == 1) return 2.0;
    return 0.0;
  }

 private:
  int dims_;
};

class ExpCos : public AnalyticScalar {
 public:
  ExpCos(double alpha, double beta, int dims) : alpha_(alpha), beta_(beta), dims_(dims) {}
  int dims() const override { return dims_; }
  double value(std::span<const double> z) const override {
    return std::exp(alpha_ * z[0]) * std::cos(beta_ * z[3]);
  }
  double d1(std::span<const double> z, int a) const override { return deriv(z, {a}); }
  double d2(std::span<const double> z, int a, int b) const override { return deriv(z, {a, b}); }
  double d3(std::span<const double> z, int a, int b, int c) const override {
    return deriv(z, {a, b, c});
  }

 private:
  double deriv(std::span<const double> z, std::initializer_list<int> der) const {
    int p = 0, q = 0;
    for (int d : der) {
      if (d == 0)
        ++p;
      else if (d == 3)
        ++q;
      else
        return 0.0;
    }
    return std::pow(alpha_, p) * std::pow(beta_, q) * std::exp(alpha_ * z[0]) *
           cos_deriv(q, beta_ * z[3]);
  }
  double alpha_, beta_;
  int dims_;
};

void require_params(const std::string& name, const std::vector<double>& params, size_t want) {
  if (params.size() != want)
    throw std::invalid_argument("analytic '" + name + "': expected " + std::to_string(want) +
                                " parameter(s), got " + std::to_string(params.size()));
}

}  // namespace

AnalyticPtr make_analytic(const std::string& name, const std::vector<double>& params, int dims) {
  if (dims < 2 || dims % 2 != 0)
    throw std::invalid_argument("analytic: dims must be an even count of real coordinates");
  if (name == "quad-psh") {
    require_params(name, params, 1);
    return std::make_shared<QuadDiag>(std::vector<double>(dims, params[0]));
  }
  if (name == "quad-diag") {
    require_params(name, params, dims);
    return std::make_shared<QuadDiag>(params);
  }
  if (name == "quad-smooth") {
    require_params(name, params, 1);
    return std::make_shared<QuadSmooth>(params[0], dims);
  }
  if (name == "bump-quartic") {
    require_params(name, params, 1 + 2 * static_cast<size_t>(dims));
    std::vector<double> lo(dims), hi(dims);
    for (int a = 0; a < dims; ++a) {
      lo[a] = params[1 + 2 * a];
      hi[a] = params[2 + 2 * a];
    }
    return std::make_shared<BumpQuartic>(params[0], lo, hi);
  }
  if (name == "bilinear-x") {
    require_params(name, params, 0);
    if (dims < 4) throw std::invalid_argument("analytic 'bilinear-x' needs n >= 2");
    return std::make_shared<BilinearX>(dims);
  }
  if (name == "cubic-mix") {
    require_params(name, params, 0);
    if (dims < 4) throw std::invalid_argument("analytic 'cubic-mix' needs n >= 2");
    return std::make_shared<CubicMix>(dims);
  }
  if (name == "exp-cos") {
    require_params(name, params, 2);
    if (dims < 4) throw std::invalid_argument("analytic 'exp-cos' needs n >= 2");
    return std::make_shared<ExpCos>(params[0], params[1], dims);
  }
  throw std::invalid_argument("analytic: unknown family '" + name + "'");
}

}  // namespace hma
