// Linear solves for the Newton systems: sparse nonsymmetric operators over
// the interior nodes of a tensor grid, with at most 8n^2 + 1 nonzeros per row
// (second-difference diagonal plus cross stencils).
//
// Strategy: a direct sparse LU factorization up to a size cutoff; above it,
// BiCGSTAB preconditioned by the exact inverse of a separable
// constant-coefficient reference operator sum_a c_a D_aa (Dirichlet second
// differences), applied in the per-axis sine eigenbasis.  Every solve is
// verified against the true residual; if the iterative path misses the
// tolerance the solver falls back to the direct factorization.
#pragma once

#include "hma/hermitian.hpp"

#include <Eigen/Sparse>

#include <string>
#include <vector>

namespace hma {

struct LinearSolveOptions {
  long direct_max_unknowns = 3000;  // SparseLU at or below this size
  double rel_tol = 1e-12;            // verified ||Ax - b|| / ||b||
  int max_iterations = 400;
};

struct LinearSolveStats {
  std::string method;         // "sparse-lu", "bicgstab-sine", or fallback tag
  int iterations = 0;         // iterative phase only
  double rel_residual = 0.0;  // verified against the true residual
};

// Separable reference operator sum_a c_a D_aa on the interior-node box:
// per-axis interior sizes, spacings, and mean diagonal stencil weights c_a.
struct SeparableReference {
  std::vector<int> sizes;
  std::vector<double> h;
  std::vector<double> coeff;
};

// Solves a x = b to the verified relative tolerance in opt, choosing the
// method by size as described above.  Throws std::runtime_error with
// diagnostics when no path reaches the tolerance.
LinearSolveStats solve_sparse(const Eigen::SparseMatrix<double>& a, const RVec& b, RVec* x,
                              const SeparableReference& ref,
                              const LinearSolveOptions& opt = {});

}  // namespace hma
