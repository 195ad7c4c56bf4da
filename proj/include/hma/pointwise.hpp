#pragma once

// Pointwise algebra of the equation
//
//   det(g^{-1} gt) = (psi / n) * tr_g(gt),   gt = chi + Hess u,
//
// written in the log form
//
//   r = log det(g^{-1} gt) - log tr_g(gt) - log(psi / n),
//
// together with its linearization F = gt^{-1} - g^{-1} / W (W = tr_g gt),
// admissibility (gt > 0 against g), subsolution and cone margins, the
// exterior-algebra coefficient oracle, the concavity probe, and the
// strict-concavity margin used by the Monte-Carlo lemma checks.

#include "hma/hermitian.hpp"

#include <vector>

namespace hma {

struct PointData {
  HermitianMat g;       // background metric at the point (positive definite)
  HermitianMat chi;     // background (1,1)-form at the point
  HermitianMat hess_u;  // complex Hessian of u at the point
  double psi = 1.0;     // right-hand side at the point

  HermitianMat gtilde() const { return chi + hess_u; }
};

HermitianMat assemble_gtilde(const HermitianMat& chi, const HermitianMat& hess_u);

// Pencil eigenvalues of gt against g.
Pencil point_pencil(const PointData& p);

// Smallest pencil eigenvalue; positive iff gt is positive against g.
double admissibility_margin(const PointData& p);

// Relative admissibility test: lambda_min > 1e-10 * max(tr_g(gt)/n, 0).
bool is_admissible(const PointData& p);

// Log-form residual; throws std::domain_error if the point is not admissible
// or psi <= 0.
double residual_point(const PointData& p);

// F = gt^{-1} - g^{-1}/W in upper-index (plain inverse) storage; positive
// definite at admissible points for n >= 2.
HermitianMat linearization_coeffs(const PointData& p);

// The psi that makes (g, chi, hess_u) an exact solution:
// psi = n det(g^{-1} gt) / tr_g(gt).  Throws if the point is not admissible.
double equation_psi(const HermitianMat& g, const HermitianMat& chi, const HermitianMat& hess_u);

// det(g^{-1} gt) - (psi/n) tr_g(gt); >= 0 is the subsolution property.
double subsolution_margin(const PointData& p);

// min_i [ n prod_{k != i} lambda_k - psi sum_{j != i} lambda_j ] over the
// pencil eigenvalues; > 0 is the cone condition.  For n = 2 this reduces to
// psi < 2 independent of the eigenvalues.
double cone_margin(const PointData& p);

// --- exterior-algebra oracle -------------------------------------------------
//
// A (1,1)-form alpha = sum A_{k l-bar} beta_{k l}, beta_{k l} = (i/2) dz_k ^
// dzbar_l, is represented by its coefficient matrix A.  The oracle expands
// wedge products literally over index permutations; no eigenvalue shortcut.

// Coefficient of mats[0]^mult[0] ^ ... relative to beta_1 ^ ... ^ beta_n.
// Multiplicities must sum to n.  E.g. omega^n / vol = n! det(G).
double wedge_top_coefficient(const std::vector<CMat>& mats, const std::vector<int>& mults, int n);

// For multiplicities summing to n-1: the Hermitian matrix H with
// H(p, q) = [Theta ^ beta_{p q}] / vol, which represents the (n-1, n-1)-form
// Theta as a Hermitian form on (1,0)-directions.
HermitianMat wedge_codim1_matrix(const std::vector<CMat>& mats, const std::vector<int>& mults,
                                 int n);

// Margins recomputed through the wedge oracle (test cross-checks for the
// eigenvalue formulas above).
double subsolution_margin_wedge(const HermitianMat& g, const HermitianMat& gbar, double psi);
double cone_margin_wedge(const HermitianMat& g, const HermitianMat& gbar, double psi);

// --- concavity ----------------------------------------------------------------

// G(X) = (det X / tr X)^{1/(n-1)} on positive definite Hermitian X; returns
// G((A+B)/2) - (G(A) + G(B))/2, which is >= 0 by concavity of G.
double concavity_probe(const HermitianMat& a, const HermitianMat& b);

// Margin of the strict-concavity inequality
//   F^{i j-bar}(gbar - gt)_{i j-bar} >= theta (1 + F^{i j-bar} g_{i j-bar})
// at a solution point `sol` against a subsolution point `sub` sharing
// (g, chi, psi).  Preconditions: residual_point(sol) ~ 0 (1e-10), sub
// admissible with cone_margin > 0.
double lemma21_margin(const PointData& sub, const PointData& sol, double theta);

}  // namespace hma
