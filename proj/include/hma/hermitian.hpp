#pragma once

// Dense complex Hermitian building blocks shared by all modules.
//
// Index conventions: a Hermitian tensor with indices (i, j-bar) is stored as a
// plain Eigen matrix M with M(i,j) = M_{i j-bar}.  Upper-index (inverse) tensors
// are stored as the plain matrix inverse; with that convention the contraction
// A^{i j-bar} B_{i j-bar} equals trace(A_mat * B_mat), which is real when both
// are Hermitian.

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>

namespace hma {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

// Hermitian matrix wrapper.  Construction rejects inputs whose asymmetry
// exceeds 1e-14 relative to the largest entry and stores (A + A^H)/2 so
// downstream algebra sees an exactly Hermitian matrix.
class HermitianMat {
 public:
  explicit HermitianMat(const CMat& a);
  HermitianMat() = default;

  static HermitianMat Identity(int n);
  static HermitianMat Zero(int n);
  // Bypasses the asymmetry check (still symmetrizes); for internal expressions
  // whose asymmetry is pure round-off amplified by conditioning.
  static HermitianMat Symmetrized(const CMat& a);

  const CMat& mat() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

  HermitianMat inverse() const;

 private:
  CMat m_;
};

HermitianMat operator+(const HermitianMat& a, const HermitianMat& b);
HermitianMat operator-(const HermitianMat& a, const HermitianMat& b);
HermitianMat operator*(double s, const HermitianMat& a);

// A^{i j-bar} B_{i j-bar} with A given in upper-index (plain inverse) storage.
double herm_inner(const HermitianMat& a_up, const HermitianMat& b);

// Generalized eigenvalues of the pencil (a, g) with g Hermitian positive
// definite, via Cholesky reduction to a standard Hermitian eigenproblem.
struct Pencil {
  RVec lambda;  // ascending

  int n() const { return static_cast<int>(lambda.size()); }
  double min() const { return lambda(0); }
  double max() const { return lambda(lambda.size() - 1); }
  double sum() const { return lambda.sum(); }
  double prod() const { return lambda.prod(); }
};

Pencil pencil(const HermitianMat& a, const HermitianMat& g);

}  // namespace hma
