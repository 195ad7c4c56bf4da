// Post-solve verification: hypothesis validators (admissibility, subsolution
// and cone margins, metric-pinching epsilon), the comparison principle, the
// gradient/Laplacian estimate ratios, the strict-concavity field scan, and
// the boundary-collar barrier inequality.
#pragma once

#include "hma/grid.hpp"
#include "hma/solver.hpp"

#include <vector>

namespace hma {

// Nodewise minima over interior nodes of the instance hypotheses, plus the
// largest epsilon with eps*omega <= chi_usub <= omega/eps (from the extreme
// pencil eigenvalues).  Verdicts, not failures: negative minima are reported,
// never thrown.  Uses the analytic Hessian recipe when the subsolution has
// one, the stencil Hessian otherwise.
struct HypothesisVerdict {
  double admissibility_min = 0.0;
  double subsolution_min = 0.0;
  double cone_min = 0.0;
  double epsilon = 0.0;
};
HypothesisVerdict validate_hypotheses(const ProblemSpec& spec);

// min(u - usub) over all nodes; PASS requires the minimum >= -1e-8 and the
// global minimum attained on the boundary (interior min within 1e-8 of the
// boundary min).  Throws when grids differ or boundary values differ by more
// than 1e-12.
struct ComparisonResult {
  double min_all = 0.0;
  double min_interior = 0.0;
  double min_boundary = 0.0;
  bool pass = false;
};
ComparisonResult comparison_check(const ScalarField& u, const ScalarField& usub);

// Measured analogues of the gradient and Laplacian a priori estimates:
// interior and boundary sups of |grad u| and of W = tr_g(chi + Hess u)
// (boundary W copied from the nearest interior node), and the two ratios
// interior_sup / (1 + boundary_sup).
struct EstimateRatios {
  double grad_interior_sup = 0.0;
  double grad_boundary_sup = 0.0;
  double lap_interior_sup = 0.0;
  double lap_boundary_sup = 0.0;
  double ratio_grad = 0.0;
  double ratio_lap = 0.0;
};
EstimateRatios estimate_ratios(const ScalarField& u, const ProblemSpec& spec);

// Counts interior nodes with W >= n_threshold where the strict-concavity
// margin  herm_inner(F, Hess usub - Hess u) - theta (1 + herm_inner(F, g))
// is negative (F evaluated at the solution).  Zero for calibrated
// (theta, N) on converged solves.
long lemma21_scan(const ScalarField& u, const ScalarField& usub, const ProblemSpec& spec,
                  double theta, double n_threshold);

// Barrier v = (u - usub) + t*sigma - T*sigma^2 on the collar of interior
// nodes with sigma < delta, where sigma is the exact distance to the box
// boundary (min over faces; one-sided at edges).  sigma is piecewise linear,
// so its complex Hessian is 0 and that of sigma^2 is E_kk/2 for the
// minimizing face's complex axis k.  min_margin is the achieved c0:
//   min over the collar of  -herm_inner(F, Hess v) / (1 + herm_inner(F, g)),
// and v_min / v_nonnegative report the sign check of v on the collar.
// Throws when the collar is empty (delta at or below the spacing) or delta
// exceeds the shortest half-width.
struct BarrierResult {
  double t = 0.0, big_t = 0.0, delta = 0.0;
  double min_margin = 0.0;
  double v_min = 0.0;
  long collar_nodes = 0;
  bool v_nonnegative = false;
};
BarrierResult barrier_check(const ScalarField& u, const ScalarField& usub,
                            const ProblemSpec& spec, double t, double big_t, double delta);

// Evaluates barrier_check over a small parameter grid (t, T, delta filtered
// to the grid's feasible range) and returns every result.
std::vector<BarrierResult> barrier_sweep(const ScalarField& u, const ScalarField& usub,
                                         const ProblemSpec& spec);

// Best sweep entry: v nonnegative first, then largest achieved c0.  Null on
// an empty sweep.
const BarrierResult* best_barrier(const std::vector<BarrierResult>& tried);

// Everything the report document carries about one solved instance.
struct EstimateReport {
  EstimateRatios ratios;
  HypothesisVerdict hypotheses;
  ComparisonResult comparison;
  double lemma_theta = 0.0;
  double lemma_n = 0.0;
  long lemma_violations = 0;
  BarrierResult barrier;
};
EstimateReport build_estimate_report(const ScalarField& u, const ProblemSpec& spec,
                                     double theta, double n_threshold, double t, double big_t,
                                     double delta);

}  // namespace hma
