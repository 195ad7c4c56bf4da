// Damped-Newton continuation solver for the discretized equation
//   det(chi + Hess u) = (psi/n) tr_g(chi + Hess u) det g
// in log-residual form, with an admissibility-preserving line search and a
// continuity path in psi seeded by the subsolution, plus the
// manufactured-solution problem generator.
#pragma once

#include "hma/grid.hpp"
#include "hma/linsolve.hpp"
#include "hma/metric.hpp"
#include "hma/pointwise.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hma {

// A fully-specified Dirichlet problem instance on a grid.
struct ProblemSpec {
  GridSpec grid;
  MetricPtr metric;
  FormSampler chi;
  ScalarField psi;   // target right-hand side, positive at every node
  PointFn phi;       // Dirichlet boundary data
  ScalarField usub;  // subsolution samples with usub = phi on the boundary

  // Optional analytic recipes.  When usub_analytic is set, hypothesis
  // validation evaluates its Hessian analytically (no stencil error); u_star
  // marks a known exact solution for error measurement.
  AnalyticPtr usub_analytic;
  AnalyticPtr u_star;
};

// Checks the ProblemSpec invariants: psi > 0 at every node, usub finite and
// equal to phi on the boundary (1e-12), and at every interior node usub
// admissible with subsolution margin >= -1e-10.  Throws std::invalid_argument
// naming the first offending node.
void validate_problem(const ProblemSpec& spec);

struct SolveOptions {
  double tol_residual = 1e-10;  // max-norm of the interior log residual
  int max_newton = 50;          // Newton iterations allowed per continuation step
  double backtrack = 0.5;
  double min_step = 1.0 / (1 << 20);
  int continuation_steps = 4;      // initial path resolution
  int max_continuation_steps = 64; // doubling cap on failure
  LinearSolveOptions linear;
};

struct SolveState {
  ScalarField u;
  double t = 0.0;
  double residual_norm = 0.0;
  int newton_iters = 0;  // cumulative over the whole path
  bool admissible = false;
};

struct ContinuationStep {
  double t = 0.0;
  int newton_iters = 0;
  double residual = 0.0;
};

struct SolveReport {
  std::vector<ContinuationStep> trace;
  int total_newton = 0;
  bool converged = false;
  std::string failure;      // empty on success
  double last_good_t = 0.0; // path parameter of the last accepted state
  // Nodes where the seed right-hand side psi0 fell more than 1e-10 below the
  // target psi (possible only through stencil error on equality-case seeds).
  long psi0_below_target = 0;
  LinearSolveStats last_linear;
};

struct SolveOutcome {
  SolveState state;
  SolveReport report;
};

// Interior residual evaluation: admissibility status plus, when admissible,
// the per-node log residuals aligned with GridSpec::interior_nodes().
struct ResidualEval {
  bool admissible = false;
  long first_bad_node = -1;  // flat index of the first inadmissible node
  RVec r;
  double max_norm = 0.0;
};
ResidualEval eval_residual(const ProblemSpec& spec, const ScalarField& u,
                           const ScalarField& psi_t);

// Discrete Jacobian of the interior residual with respect to interior values
// of u (exact for the stencil discretization), the residual itself, and the
// separable reference data for preconditioning.
struct NewtonSystem {
  Eigen::SparseMatrix<double> jacobian;
  RVec residual;
  SeparableReference reference;
};
NewtonSystem assemble_newton_system(const ProblemSpec& spec, const ScalarField& u,
                                    const ScalarField& psi_t);

// Seed right-hand side: equation_psi of the discrete Hessian of usub at
// interior nodes (so usub solves the t=0 equation exactly; asserted to
// 1e-14), target psi on the boundary.  Throws std::invalid_argument naming
// the node if usub is not discretely admissible somewhere.
ScalarField initial_psi(const ProblemSpec& spec);

// Convex blend (1-t) psi0 + t psi.
ScalarField blend_psi(const ScalarField& psi0, const ScalarField& psi, double t);

// One Newton direction: solves jacobian * delta = -residual with delta = 0 on
// the boundary.  Returns the direction field and the predicted decrease (the
// current residual max-norm, which a full undamped step removes to first
// order).  Throws on inadmissible u or linear-solver breakdown.
std::pair<ScalarField, double> newton_step(const ProblemSpec& spec, const ScalarField& u,
                                           const ScalarField& psi_t,
                                           const LinearSolveOptions& linear_opts,
                                           LinearSolveStats* stats = nullptr);

// Backtracking line search over s in {1, 1/2, ..., min_step}: accepts the
// largest step keeping every interior node admissible and strictly
// decreasing the residual max-norm.  A zero direction returns the state
// unchanged with step 1.  Throws std::runtime_error("line search failed...")
// when no step qualifies.
struct LineSearchResult {
  ScalarField u;
  double residual_norm = 0.0;
  double step = 0.0;
};
LineSearchResult line_search_admissible(const ProblemSpec& spec, const ScalarField& u,
                                        double current_norm, const ScalarField& direction,
                                        const ScalarField& psi_t, const SolveOptions& opts);

// Full continuation solve.  Never throws for path failure: on success the
// report has converged = true and the state sits at t = 1 with residual
// max-norm <= tol; on failure the report carries the reason and the state is
// the last accepted one (report.last_good_t).
SolveOutcome solve_continuation(const ProblemSpec& spec, const SolveOptions& opts = {});

// Manufactured-solution generator: psi := equation_psi from the analytic
// Hessian of u_star at every node, phi := u_star on the boundary, and
// usub := u_star samples (equality case of the subsolution inequality).
// Throws std::invalid_argument naming the node where u_star fails strict
// admissibility on the closed box.
ProblemSpec mms_generate(MetricPtr metric, FormSampler chi, AnalyticPtr u_star,
                         const GridSpec& grid);

// Named (1,1)-form samplers for chi: "zero", "omega" (the metric itself),
// "identity-scaled" (params: [c], default 1).
FormSampler make_form_sampler(const std::string& name, const std::vector<double>& params,
                              const MetricPtr& metric, int n);

}  // namespace hma
