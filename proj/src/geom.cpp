#include "hma/geom.hpp"

#include <stdexcept>

namespace hma {

namespace {

CMat metric_inverse(const MetricField& metric, std::span<const double> z) {
  Eigen::LLT<CMat> llt(metric.at(z).mat());
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("geom: metric not positive definite at evaluation point");
  const int n = metric.n();
  return llt.solve(CMat::Identity(n, n));
}

}  // namespace

ConnectionCoeffs chern_connection(const MetricField& metric, std::span<const double> z) {
  const int n = metric.n();
  const CMat ginv = metric_inverse(metric, z);
  ConnectionCoeffs c;
  c.gamma.reserve(n);
  // Gamma^l_{i k} = sum_m g^{l m-bar} d_i g_{k m-bar} = (dG_i * Ginv)(k, l).
  for (int i = 0; i < n; ++i) c.gamma.push_back(metric.dg_z(z, i) * ginv);
  return c;
}

TorsionTensor torsion(const MetricField& metric, std::span<const double> z) {
  const int n = metric.n();
  const ConnectionCoeffs c = chern_connection(metric, z);
  const CMat g = metric.g(z);
  TorsionTensor t;
  t.up.assign(n, CMat::Zero(n, n));
  t.low.assign(n, CMat::Zero(n, n));
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) t.up[l](i, j) = c.gamma[i](j, l) - c.gamma[j](i, l);
  // T_{i j k-bar} = T^l_{i j} g_{l k-bar}.
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Complex s = 0;
        for (int l = 0; l < n; ++l) s += t.up[l](i, j) * g(l, k);
        t.low[k](i, j) = s;
      }
  return t;
}

CurvatureTensor curvature(const MetricField& metric, std::span<const double> z) {
  const int n = metric.n();
  const CMat ginv = metric_inverse(metric, z);
  std::vector<CMat> dgz(n);
  for (int i = 0; i < n; ++i) dgz[i] = metric.dg_z(z, i);
  CurvatureTensor cur;
  cur.r.assign(n, std::vector<CMat>(n));
  // (dG_i * Ginv * dG_j^H)(k, l) = g^{p q-bar} (d_i g_{k q-bar})(d_jbar g_{p l-bar}).
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      cur.r[i][j] = -metric.ddg_zzbar(z, i, j) + dgz[i] * ginv * dgz[j].adjoint();
  return cur;
}

double commutation_residual(const MetricField& metric, const AnalyticScalar& v,
                            std::span<const double> z) {
  const int n = metric.n();
  if (v.dims() != 2 * n)
    throw std::invalid_argument("commutation_residual: test function dimension mismatch");
  const ConnectionCoeffs c = chern_connection(metric, z);
  const TorsionTensor t = torsion(metric, z);
  const CMat h = v.complex_hessian(z).mat();

  auto cov3 = [&](int i, int j, int k) {
    // v_{i j-bar k} = d_k v_{i j-bar} - Gamma^l_{k i} v_{l j-bar}.
    Complex s = v.hessian_dz(z, i, j, k);
    for (int l = 0; l < n; ++l) s -= c.gamma[k](i, l) * h(l, j);
    return s;
  };

  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Complex rhs = 0;
        for (int l = 0; l < n; ++l) rhs += t.up[l](i, k) * h(l, j);
        worst = std::max(worst, std::abs(cov3(i, j, k) - cov3(k, j, i) - rhs));
      }
  return worst;
}

}  // namespace hma
