#include "hma/hermitian.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <string>

namespace hma {

namespace {

double max_abs(const CMat& a) {
  double v = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) v = std::max(v, std::abs(a(i, j)));
  return v;
}

}  // namespace

HermitianMat::HermitianMat(const CMat& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("HermitianMat: matrix not square");
  const double scale = std::max(max_abs(a), 1.0);
  const double asym = max_abs(CMat(a - a.adjoint()));
  if (asym > 1e-14 * scale)
    throw std::invalid_argument("HermitianMat: asymmetry " + std::to_string(asym) +
                                " exceeds 1e-14 relative tolerance");
  m_ = 0.5 * (a + a.adjoint());
}

HermitianMat HermitianMat::Identity(int n) { return HermitianMat(CMat::Identity(n, n)); }

HermitianMat HermitianMat::Zero(int n) { return HermitianMat(CMat::Zero(n, n)); }

HermitianMat HermitianMat::Symmetrized(const CMat& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("HermitianMat: matrix not square");
  HermitianMat h;
  h.m_ = 0.5 * (a + a.adjoint());
  return h;
}

HermitianMat HermitianMat::inverse() const {
  return HermitianMat::Symmetrized(m_.inverse());
}

HermitianMat operator+(const HermitianMat& a, const HermitianMat& b) {
  return HermitianMat::Symmetrized(a.mat() + b.mat());
}

HermitianMat operator-(const HermitianMat& a, const HermitianMat& b) {
  return HermitianMat::Symmetrized(a.mat() - b.mat());
}

HermitianMat operator*(double s, const HermitianMat& a) {
  return HermitianMat::Symmetrized(s * a.mat());
}

double herm_inner(const HermitianMat& a_up, const HermitianMat& b) {
  return (a_up.mat() * b.mat()).trace().real();
}

Pencil pencil(const HermitianMat& a, const HermitianMat& g) {
  Eigen::LLT<CMat> llt(g.mat());
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("pencil: right-hand matrix not positive definite");
  // B = L^{-1} A L^{-H} shares the pencil eigenvalues and is Hermitian.
  const CMat& L = llt.matrixL();
  CMat B = L.triangularView<Eigen::Lower>().solve(a.mat());
  B = L.triangularView<Eigen::Lower>().solve(B.adjoint().eval()).adjoint();
  Eigen::SelfAdjointEigenSolver<CMat> eig(0.5 * (B + B.adjoint()), Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw std::runtime_error("pencil: eigensolver failed");
  Pencil p;
  p.lambda = eig.eigenvalues();
  return p;
}

}  // namespace hma
