#include "hma/metric.hpp"

#include <cmath>
#include <stdexcept>

namespace hma {

CMat MetricField::dg_z(std::span<const double> z, int i) const {
  return 0.5 * (dg(z, 2 * i) - Complex(0, 1) * dg(z, 2 * i + 1));
}

CMat MetricField::ddg_zzbar(std::span<const double> z, int i, int j) const {
  CMat re = ddg(z, 2 * i, 2 * j) + ddg(z, 2 * i + 1, 2 * j + 1);
  CMat im = ddg(z, 2 * i, 2 * j + 1) - ddg(z, 2 * i + 1, 2 * j);
  return 0.25 * (re + Complex(0, 1) * im);
}

HermitianMat MetricField::at(std::span<const double> z) const { return HermitianMat(g(z)); }

namespace {

class Euclidean : public MetricField {
 public:
  explicit Euclidean(int n) : n_(n), name_("euclidean") {}
  int n() const override { return n_; }
  const std::string& name() const override { return name_; }
  const std::vector<double>& params() const override { return params_; }
  CMat g(std::span<const double>) const override { return CMat::Identity(n_, n_); }
  CMat dg(std::span<const double>, int) const override { return CMat::Zero(n_, n_); }
  CMat ddg(std::span<const double>, int, int) const override { return CMat::Zero(n_, n_); }

 private:
  int n_;
  std::string name_;
  std::vector<double> params_;
};

class ConformalExp : public MetricField {
 public:
  ConformalExp(double a, int n) : a_(a), n_(n), name_("conformal-exp"), params_{a} {}
  int n() const override { return n_; }
  const std::string& name() const override { return name_; }
  const std::vector<double>& params() const override { return params_; }
  CMat g(std::span<const double> z) const override {
    return std::exp(a_ * z[0]) * CMat::Identity(n_, n_);
  }
  CMat dg(std::span<const double> z, int a) const override {
    if (a != 0) return CMat::Zero(n_, n_);
    return a_ * std::exp(a_ * z[0]) * CMat::Identity(n_, n_);
  }
  CMat ddg(std::span<const double> z, int a, int b) const override {
    if (a != 0 || b != 0) return CMat::Zero(n_, n_);
    return a_ * a_ * std::exp(a_ * z[0]) * CMat::Identity(n_, n_);
  }

 private:
  double a_;
  int n_;
  std::string name_;
  std::vector<double> params_;
};

class DiagAnisotropic : public MetricField {
 public:
  DiagAnisotropic(std::vector<double> amp, double b, int n)
      : amp_(std::move(amp)), b_(b), n_(n), name_("diag-anisotropic") {
    params_ = amp_;
    params_.push_back(b_);
  }
  int n() const override { return n_; }
  const std::string& name() const override { return name_; }
  const std::vector<double>& params() const override { return params_; }
  CMat g(std::span<const double> z) const override {
    CMat m = CMat::Zero(n_, n_);
    for (int k = 0; k < n_; ++k) m(k, k) = 1.0 + amp_[k] * std::sin(b_ * z[2 * k]);
    return m;
  }
  CMat dg(std::span<const double> z, int a) const override {
    CMat m = CMat::Zero(n_, n_);
    if (a % 2 == 0) {
      const int k = a / 2;
      m(k, k) = amp_[k] * b_ * std::cos(b_ * z[2 * k]);
    }
    return m;
  }
  CMat ddg(std::span<const double> z, int a, int b) const override {
    CMat m = CMat::Zero(n_, n_);
    if (a == b && a % 2 == 0) {
      const int k = a / 2;
      m(k, k) = -amp_[k] * b_ * b_ * std::sin(b_ * z[2 * k]);
    }
    return m;
  }

 private:
  std::vector<double> amp_;
  double b_;
  int n_;
  std::string name_;
  std::vector<double> params_;
};

}  // namespace

MetricPtr make_builtin_metric(const std::string& name, const std::vector<double>& params, int n) {
  if (n < 1) throw std::invalid_argument("metric: dimension must be positive");
  if (name == "euclidean") {
    if (!params.empty()) throw std::invalid_argument("metric 'euclidean' takes no parameters");
    return std::make_shared<Euclidean>(n);
  }
  if (name == "conformal-exp") {
    if (params.size() != 1)
      throw std::invalid_argument("metric 'conformal-exp' takes one parameter [a]");
    return std::make_shared<ConformalExp>(params[0], n);
  }
  if (name == "diag-anisotropic") {
    if (params.size() != static_cast<size_t>(n) + 1)
      throw std::invalid_argument("metric 'diag-anisotropic' takes parameters [a_1..a_n, b]");
    std::vector<double> amp(params.begin(), params.end() - 1);
    for (double a : amp)
      if (std::abs(a) >= 1.0)
        throw std::invalid_argument(
            "metric 'diag-anisotropic': |a_k| < 1 required for positive definiteness");
    return std::make_shared<DiagAnisotropic>(amp, params.back(), n);
  }
  throw std::invalid_argument("metric: unknown family '" + name + "' (supported: euclidean, conformal-exp, diag-anisotropic)");
}

const std::vector<std::string>& builtin_metric_names() {
  static const std::vector<std::string> names = {"euclidean", "conformal-exp",
                                                 "diag-anisotropic"};
  return names;
}

}  // namespace hma
