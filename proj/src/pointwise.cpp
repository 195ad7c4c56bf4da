#include "hma/pointwise.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hma {

namespace {

constexpr double kAdmissibleRel = 1e-10;

void require_same_dim(const PointData& p) {
  const int n = p.g.dim();
  if (p.chi.dim() != n || p.hess_u.dim() != n)
    throw std::invalid_argument("PointData: dimension mismatch between g, chi, hess_u");
}

RVec pd_eigenvalues(const HermitianMat& a, const char* what) {
  Eigen::SelfAdjointEigenSolver<CMat> eig(a.mat(), Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  if (eig.eigenvalues()(0) <= 0.0)
    throw std::domain_error(std::string(what) + ": matrix not positive definite");
  return eig.eigenvalues();
}

}  // namespace

HermitianMat assemble_gtilde(const HermitianMat& chi, const HermitianMat& hess_u) {
  if (chi.dim() != hess_u.dim())
    throw std::invalid_argument("assemble_gtilde: dimension mismatch");
  return chi + hess_u;
}

Pencil point_pencil(const PointData& p) {
  require_same_dim(p);
  return pencil(p.gtilde(), p.g);
}

double admissibility_margin(const PointData& p) { return point_pencil(p).min(); }

bool is_admissible(const PointData& p) {
  const Pencil pc = point_pencil(p);
  const int n = pc.n();
  return pc.min() > kAdmissibleRel * std::max(pc.sum() / n, 0.0);
}

double residual_point(const PointData& p) {
  if (p.psi <= 0.0)
    throw std::domain_error("residual_point: psi must be positive (ellipticity degenerates)");
  const Pencil pc = point_pencil(p);
  const int n = pc.n();
  if (!(pc.min() > kAdmissibleRel * std::max(pc.sum() / n, 0.0)))
    throw std::domain_error("residual_point: point not admissible (min pencil eigenvalue " +
                            std::to_string(pc.min()) + ")");
  double log_det = 0.0;
  for (int i = 0; i < n; ++i) log_det += std::log(pc.lambda(i));
  return log_det - std::log(pc.sum()) - std::log(p.psi / n);
}

HermitianMat linearization_coeffs(const PointData& p) {
  const Pencil pc = point_pencil(p);
  const int n = pc.n();
  if (!(pc.min() > kAdmissibleRel * std::max(pc.sum() / n, 0.0)))
    throw std::domain_error("linearization_coeffs: point not admissible");
  const double w = pc.sum();
  const CMat f = p.gtilde().mat().inverse() - p.g.mat().inverse() / w;
  return HermitianMat::Symmetrized(f);
}

double equation_psi(const HermitianMat& g, const HermitianMat& chi, const HermitianMat& hess_u) {
  PointData p{g, chi, hess_u, 1.0};
  const Pencil pc = point_pencil(p);
  const int n = pc.n();
  if (!(pc.min() > kAdmissibleRel * std::max(pc.sum() / n, 0.0)))
    throw std::domain_error("equation_psi: point not admissible");
  return n * pc.prod() / pc.sum();
}

double subsolution_margin(const PointData& p) {
  const Pencil pc = point_pencil(p);
  return pc.prod() - (p.psi / pc.n()) * pc.sum();
}

double cone_margin(const PointData& p) {
  const Pencil pc = point_pencil(p);
  const int n = pc.n();
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    double prod = 1.0, sum = 0.0;
    for (int k = 0; k < n; ++k) {
      if (k == i) continue;
      prod *= pc.lambda(k);
      sum += pc.lambda(k);
    }
    worst = std::min(worst, n * prod - p.psi * sum);
  }
  return worst;
}

// --- exterior-algebra oracle -------------------------------------------------

namespace {

// Coefficient of A^(0) ^ ... ^ A^(n-1) relative to beta_1 ^ ... ^ beta_n:
// sum over permutation pairs (sigma, tau) of sgn(sigma) sgn(tau)
// prod_m A^(m)(sigma(m), tau(m)).  Literal expansion, n <= a few.
Complex wedge_product_coefficient(const std::vector<const CMat*>& factors, int n) {
  std::vector<int> sigma(n), tau(n);
  std::iota(sigma.begin(), sigma.end(), 0);
  Complex total = 0;

  auto sign_of = [](std::vector<int> perm) {
    int sgn = 1;
    for (size_t i = 0; i < perm.size(); ++i)
      for (size_t j = i + 1; j < perm.size(); ++j)
        if (perm[i] > perm[j]) sgn = -sgn;
    return sgn;
  };

  do {
    const int s_sigma = sign_of(sigma);
    std::iota(tau.begin(), tau.end(), 0);
    do {
      Complex term = static_cast<double>(s_sigma * sign_of(tau));
      for (int m = 0; m < n; ++m) term *= (*factors[m])(sigma[m], tau[m]);
      total += term;
    } while (std::next_permutation(tau.begin(), tau.end()));
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return total;
}

std::vector<const CMat*> expand_factors(const std::vector<CMat>& mats,
                                        const std::vector<int>& mults, int n, int want) {
  if (mats.size() != mults.size())
    throw std::invalid_argument("wedge oracle: mats/mults length mismatch");
  std::vector<const CMat*> factors;
  for (size_t i = 0; i < mats.size(); ++i) {
    if (mats[i].rows() != n || mats[i].cols() != n)
      throw std::invalid_argument("wedge oracle: factor dimension mismatch");
    if (mults[i] < 0) throw std::invalid_argument("wedge oracle: negative multiplicity");
    for (int c = 0; c < mults[i]; ++c) factors.push_back(&mats[i]);
  }
  if (static_cast<int>(factors.size()) != want)
    throw std::invalid_argument("wedge oracle: multiplicities must sum to " +
                                std::to_string(want));
  return factors;
}

}  // namespace

double wedge_top_coefficient(const std::vector<CMat>& mats, const std::vector<int>& mults,
                             int n) {
  auto factors = expand_factors(mats, mults, n, n);
  const Complex c = wedge_product_coefficient(factors, n);
  return c.real();
}

HermitianMat wedge_codim1_matrix(const std::vector<CMat>& mats, const std::vector<int>& mults,
                                 int n) {
  auto factors = expand_factors(mats, mults, n, n - 1);
  CMat h(n, n);
  CMat unit = CMat::Zero(n, n);
  factors.push_back(&unit);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      unit.setZero();
      unit(p, q) = 1.0;
      h(p, q) = wedge_product_coefficient(factors, n);
    }
  return HermitianMat::Symmetrized(h);
}

double subsolution_margin_wedge(const HermitianMat& g, const HermitianMat& gbar, double psi) {
  const int n = g.dim();
  // gbar^n / omega^n = det(g^{-1} gbar);
  // n * (gbar ^ omega^{n-1}) / omega^n = tr_g(gbar).
  const double vol = wedge_top_coefficient({g.mat()}, {n}, n);
  const double top = wedge_top_coefficient({gbar.mat()}, {n}, n);
  const double mixed = wedge_top_coefficient({gbar.mat(), g.mat()}, {1, n - 1}, n);
  return (top - psi * mixed) / vol;
}

double cone_margin_wedge(const HermitianMat& g, const HermitianMat& gbar, double psi) {
  const int n = g.dim();
  if (n < 2) throw std::invalid_argument("cone_margin_wedge: needs n >= 2");
  // Theta = n gbar^{n-1} - (n-1) psi gbar ^ omega^{n-2}, as a Hermitian form on
  // (1,0)-directions, compared against omega^{n-1}.  Both coefficient matrices
  // transform by the same congruence under frame changes, so the pencil
  // eigenvalues reproduce the diagonal-frame margins, (n-1)! included.
  HermitianMat h_pow = wedge_codim1_matrix({gbar.mat()}, {n - 1}, n);
  HermitianMat h_mix = wedge_codim1_matrix({gbar.mat(), g.mat()}, {1, n - 2}, n);
  HermitianMat h_omega = wedge_codim1_matrix({g.mat()}, {n - 1}, n);
  HermitianMat theta = static_cast<double>(n) * h_pow - (n - 1.0) * psi * h_mix;
  return pencil(theta, h_omega).min();
}

// --- concavity ----------------------------------------------------------------

namespace {

double det_over_trace_pow(const HermitianMat& x, const char* what) {
  const RVec ev = pd_eigenvalues(x, what);
  const int n = static_cast<int>(ev.size());
  return std::pow(ev.prod() / ev.sum(), 1.0 / (n - 1));
}

}  // namespace

double concavity_probe(const HermitianMat& a, const HermitianMat& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("concavity_probe: dimension mismatch");
  if (a.dim() < 2) throw std::invalid_argument("concavity_probe: needs n >= 2");
  const HermitianMat mid = 0.5 * (a + b);
  return det_over_trace_pow(mid, "concavity_probe") -
         0.5 * (det_over_trace_pow(a, "concavity_probe") +
                det_over_trace_pow(b, "concavity_probe"));
}

double lemma21_margin(const PointData& sub, const PointData& sol, double theta) {
  require_same_dim(sub);
  require_same_dim(sol);
  const double scale = std::max(1.0, sol.g.mat().cwiseAbs().maxCoeff());
  if ((sub.g.mat() - sol.g.mat()).cwiseAbs().maxCoeff() > 1e-12 * scale ||
      (sub.chi.mat() - sol.chi.mat()).cwiseAbs().maxCoeff() >
          1e-12 * std::max(1.0, sol.chi.mat().cwiseAbs().maxCoeff()) ||
      sub.psi != sol.psi)
    throw std::invalid_argument("lemma21_margin: points must share g, chi, psi");
  if (std::abs(residual_point(sol)) > 1e-10)
    throw std::invalid_argument("lemma21_margin: 'sol' does not satisfy the equation");
  if (!is_admissible(sub) || !(cone_margin(sub) > 0.0))
    throw std::invalid_argument("lemma21_margin: 'sub' must be admissible with cone margin > 0");
  const HermitianMat f = linearization_coeffs(sol);
  const HermitianMat diff = sub.gtilde() - sol.gtilde();
  return herm_inner(f, diff) - theta * (1.0 + herm_inner(f, sol.g));
}

}  // namespace hma
