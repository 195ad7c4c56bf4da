#pragma once

// Chern connection, torsion, and curvature of a Hermitian metric, plus the
// covariant-derivative commutation identity used to pin down all sign and
// index conventions:
//
//   Gamma^l_ik = g^{l m-bar} d_i g_{k m-bar}
//   T^l_ij     = Gamma^l_ij - Gamma^l_ji
//   R_{i j-bar k l-bar} = -d_i d_jbar g_{k l-bar}
//                         + g^{p q-bar} (d_i g_{k q-bar})(d_jbar g_{p l-bar})
//   v_{i j-bar k} = d_k v_{i j-bar} - Gamma^l_{k i} v_{l j-bar}
//   v_{i j-bar k} - v_{k j-bar i} = T^l_{i k} v_{l j-bar}

#include "hma/analytic.hpp"
#include "hma/hermitian.hpp"
#include "hma/metric.hpp"

#include <span>
#include <vector>

namespace hma {

// gamma[i](k, l) = Gamma^l_{i k}.
struct ConnectionCoeffs {
  std::vector<CMat> gamma;
};

// up[l](i, j) = T^l_{i j} (antisymmetric in i, j); low[k](i, j) = T_{i j k-bar}.
struct TorsionTensor {
  std::vector<CMat> up;
  std::vector<CMat> low;
};

// r[i][j](k, l) = R_{i j-bar k l-bar}.
struct CurvatureTensor {
  std::vector<std::vector<CMat>> r;
};

ConnectionCoeffs chern_connection(const MetricField& metric, std::span<const double> z);
TorsionTensor torsion(const MetricField& metric, std::span<const double> z);
CurvatureTensor curvature(const MetricField& metric, std::span<const double> z);

// Max over (i, j, k) of |v_{i j-bar k} - v_{k j-bar i} - T^l_{i k} v_{l j-bar}|
// for an analytic test function v, its derivatives taken in closed form.
double commutation_residual(const MetricField& metric, const AnalyticScalar& v,
                            std::span<const double> z);

}  // namespace hma
