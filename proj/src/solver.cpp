#include "hma/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hma {

namespace {

std::span<const double> as_span(const RVec& z) {
  return {z.data(), static_cast<size_t>(z.size())};
}

std::string node_label(const GridSpec& spec, long flat) {
  std::ostringstream os;
  os << "node " << flat << " (index";
  for (int v : spec.unflatten(flat)) os << ' ' << v;
  os << ") at (";
  const RVec z = spec.point_flat(flat);
  for (int a = 0; a < z.size(); ++a) os << (a == 0 ? "" : ", ") << z[a];
  os << ")";
  return os.str();
}

void check_shapes(const ProblemSpec& spec) {
  if (!spec.metric) throw std::invalid_argument("ProblemSpec: missing metric");
  if (!spec.chi) throw std::invalid_argument("ProblemSpec: missing chi sampler");
  if (!spec.phi) throw std::invalid_argument("ProblemSpec: missing boundary data");
  if (spec.metric->n() != spec.grid.n)
    throw std::invalid_argument("ProblemSpec: metric dimension mismatch");
  if (!(spec.psi.spec == spec.grid) || !(spec.usub.spec == spec.grid))
    throw std::invalid_argument("ProblemSpec: field grids do not match the problem grid");
}

// Hessian of usub: analytic recipe when present, stencil otherwise.
HermitianMat usub_hessian(const ProblemSpec& spec, long flat) {
  if (spec.usub_analytic) {
    const RVec z = spec.grid.point_flat(flat);
    return spec.usub_analytic->complex_hessian(as_span(z));
  }
  return complex_hessian_flat(spec.usub, flat);
}

// Maps interior flat indices to their rank in GridSpec::interior_nodes()
// order; -1 elsewhere.
std::vector<long> interior_ranks(const GridSpec& spec, const std::vector<long>& nodes) {
  std::vector<long> rank(spec.total(), -1);
  for (long i = 0; i < static_cast<long>(nodes.size()); ++i) rank[nodes[i]] = i;
  return rank;
}

// Real symmetric stencil-weight matrix over the 2n real axes for the
// linearized operator v -> herm_inner(F, Hess v):
//   L[v] = sum_{k,l} [ (A_kl/4)(v_{x_k x_l} + v_{y_k y_l}) + (B_kl/2) v_{x_k y_l} ],
// with F = A + iB (A symmetric, B antisymmetric).  Entry S(a,b) multiplies
// the real second derivative along axes (a, b).
Eigen::MatrixXd stencil_weights(const HermitianMat& f) {
  const int n = f.dim();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      const double a = f.mat()(k, l).real();
      const double b = f.mat()(k, l).imag();
      s(2 * k, 2 * l) += 0.25 * a;
      s(2 * k + 1, 2 * l + 1) += 0.25 * a;
      // v_{x_k y_l} carries B_kl/2 split across the symmetric pair.
      s(2 * k, 2 * l + 1) += 0.25 * b;
      s(2 * l + 1, 2 * k) += 0.25 * b;
    }
  }
  return s;
}

}  // namespace

void validate_problem(const ProblemSpec& spec) {
  check_shapes(spec);
  if (!spec.usub.all_finite())
    throw std::invalid_argument("ProblemSpec: subsolution field has non-finite values");

  for (long flat = 0; flat < spec.grid.total(); ++flat) {
    if (!(spec.psi.values[flat] > 0.0))
      throw std::invalid_argument(
          "ProblemSpec: psi must be positive (ellipticity of the log form) at " +
          node_label(spec.grid, flat));
    if (!spec.grid.is_interior_flat(flat)) {
      const RVec z = spec.grid.point_flat(flat);
      const double bc = spec.phi(as_span(z));
      if (!(std::abs(spec.usub.values[flat] - bc) <= 1e-12))
        throw std::invalid_argument(
            "ProblemSpec: subsolution does not match the boundary data at " +
            node_label(spec.grid, flat));
    }
  }

  for (long flat : spec.grid.interior_nodes()) {
    const RVec z = spec.grid.point_flat(flat);
    const PointData p{spec.metric->at(as_span(z)), spec.chi(as_span(z)),
                      usub_hessian(spec, flat), spec.psi.values[flat]};
    if (!(admissibility_margin(p) > 0.0))
      throw std::invalid_argument("ProblemSpec: subsolution is not admissible at " +
                                  node_label(spec.grid, flat));
    if (!(subsolution_margin(p) >= -1e-10))
      throw std::invalid_argument("ProblemSpec: subsolution inequality fails at " +
                                  node_label(spec.grid, flat));
  }
}

ResidualEval eval_residual(const ProblemSpec& spec, const ScalarField& u,
                           const ScalarField& psi_t) {
  check_shapes(spec);
  if (!(u.spec == spec.grid) || !(psi_t.spec == spec.grid))
    throw std::invalid_argument("eval_residual: field grid mismatch");
  const std::vector<long> nodes = spec.grid.interior_nodes();
  ResidualEval out;
  out.r.resize(nodes.size());
  for (long i = 0; i < static_cast<long>(nodes.size()); ++i) {
    const long flat = nodes[i];
    const RVec z = spec.grid.point_flat(flat);
    const PointData p{spec.metric->at(as_span(z)), spec.chi(as_span(z)),
                      complex_hessian_flat(u, flat), psi_t.values[flat]};
    if (!is_admissible(p)) {
      out.admissible = false;
      out.first_bad_node = flat;
      out.r.resize(0);
      out.max_norm = std::numeric_limits<double>::infinity();
      return out;
    }
    out.r[i] = residual_point(p);
  }
  out.admissible = true;
  out.max_norm = out.r.size() > 0 ? out.r.cwiseAbs().maxCoeff() : 0.0;
  return out;
}

NewtonSystem assemble_newton_system(const ProblemSpec& spec, const ScalarField& u,
                                    const ScalarField& psi_t) {
  check_shapes(spec);
  const GridSpec& grid = spec.grid;
  const std::vector<long> nodes = grid.interior_nodes();
  const std::vector<long> rank = interior_ranks(grid, nodes);
  const int d = grid.axes();

  NewtonSystem sys;
  sys.residual.resize(nodes.size());
  sys.reference.sizes.assign(d, grid.m - 2);
  sys.reference.h.resize(d);
  for (int a = 0; a < d; ++a) sys.reference.h[a] = grid.h(a);
  RVec coeff_sum = RVec::Zero(d);

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(nodes.size() * (8 * grid.n * grid.n + 1));

  for (long i = 0; i < static_cast<long>(nodes.size()); ++i) {
    const long flat = nodes[i];
    const RVec z = grid.point_flat(flat);
    const PointData p{spec.metric->at(as_span(z)), spec.chi(as_span(z)),
                      complex_hessian_flat(u, flat), psi_t.values[flat]};
    if (!is_admissible(p))
      throw std::domain_error("assemble_newton_system: state inadmissible at " +
                              node_label(grid, flat));
    sys.residual[i] = residual_point(p);
    const Eigen::MatrixXd s = stencil_weights(linearization_coeffs(p));

    auto add = [&](long col_flat, double w) {
      const long j = rank[col_flat];
      if (j >= 0) trips.emplace_back(i, j, w);  // boundary columns carry delta = 0
    };

    double center = 0.0;
    for (int a = 0; a < d; ++a) {
      const long sa = grid.stride(a);
      const double wa = s(a, a) / (grid.h(a) * grid.h(a));
      add(flat + sa, wa);
      add(flat - sa, wa);
      center -= 2.0 * wa;
      coeff_sum[a] += s(a, a);
      for (int b = a + 1; b < d; ++b) {
        const long sb = grid.stride(b);
        const double wab = s(a, b) / (2.0 * grid.h(a) * grid.h(b));
        add(flat + sa + sb, wab);
        add(flat - sa - sb, wab);
        add(flat + sa - sb, -wab);
        add(flat - sa + sb, -wab);
      }
    }
    add(flat, center);
  }

  sys.reference.coeff.resize(d);
  for (int a = 0; a < d; ++a) sys.reference.coeff[a] = coeff_sum[a] / nodes.size();

  sys.jacobian.resize(nodes.size(), nodes.size());
  sys.jacobian.setFromTriplets(trips.begin(), trips.end());
  sys.jacobian.makeCompressed();
  return sys;
}

ScalarField initial_psi(const ProblemSpec& spec) {
  check_shapes(spec);
  ScalarField psi0 = spec.psi;  // boundary nodes keep the target values
  for (long flat : spec.grid.interior_nodes()) {
    const RVec z = spec.grid.point_flat(flat);
    const HermitianMat g = spec.metric->at(as_span(z));
    const HermitianMat chi = spec.chi(as_span(z));
    const HermitianMat hess = complex_hessian_flat(spec.usub, flat);
    const PointData probe{g, chi, hess, 1.0};
    if (!is_admissible(probe))
      throw std::invalid_argument("initial_psi: subsolution is not admissible at " +
                                  node_label(spec.grid, flat));
    const double p0 = equation_psi(g, chi, hess);
    psi0.values[flat] = p0;
    const double r0 = residual_point(PointData{g, chi, hess, p0});
    if (!(std::abs(r0) <= 1e-14))
      throw std::logic_error("initial_psi: seed residual not zero at " +
                             node_label(spec.grid, flat));
  }
  return psi0;
}

ScalarField blend_psi(const ScalarField& psi0, const ScalarField& psi, double t) {
  if (!(psi0.spec == psi.spec)) throw std::invalid_argument("blend_psi: grid mismatch");
  ScalarField out = psi0;
  out.values = (1.0 - t) * psi0.values + t * psi.values;
  return out;
}

std::pair<ScalarField, double> newton_step(const ProblemSpec& spec, const ScalarField& u,
                                           const ScalarField& psi_t,
                                           const LinearSolveOptions& linear_opts,
                                           LinearSolveStats* stats) {
  NewtonSystem sys = assemble_newton_system(spec, u, psi_t);
  RVec delta;
  const LinearSolveStats st =
      solve_sparse(sys.jacobian, -sys.residual, &delta, sys.reference, linear_opts);
  if (stats != nullptr) *stats = st;

  ScalarField direction = ScalarField::zeros(spec.grid);
  const std::vector<long> nodes = spec.grid.interior_nodes();
  for (long i = 0; i < static_cast<long>(nodes.size()); ++i)
    direction.values[nodes[i]] = delta[i];
  const double predicted =
      sys.residual.size() > 0 ? sys.residual.cwiseAbs().maxCoeff() : 0.0;
  return {std::move(direction), predicted};
}

LineSearchResult line_search_admissible(const ProblemSpec& spec, const ScalarField& u,
                                        double current_norm, const ScalarField& direction,
                                        const ScalarField& psi_t, const SolveOptions& opts) {
  if (!(direction.spec == spec.grid) || !(u.spec == spec.grid))
    throw std::invalid_argument("line_search_admissible: grid mismatch");
  const double dir_max = direction.values.cwiseAbs().maxCoeff();
  if (dir_max == 0.0) {
    LineSearchResult res;
    res.u = u;
    res.residual_norm = current_norm;
    res.step = 1.0;
    return res;
  }

  ScalarField trial = u;
  for (double s = 1.0; s >= opts.min_step; s *= opts.backtrack) {
    trial.values = u.values + s * direction.values;
    const ResidualEval ev = eval_residual(spec, trial, psi_t);
    if (!ev.admissible) continue;
    if (ev.max_norm < current_norm) {
      LineSearchResult res;
      res.u = std::move(trial);
      res.residual_norm = ev.max_norm;
      res.step = s;
      return res;
    }
  }
  std::ostringstream msg;
  msg << "line search failed: no admissible residual-decreasing step above " << opts.min_step
      << " (residual " << current_norm << ")";
  throw std::runtime_error(msg.str());
}

namespace {

// Newton iteration at fixed psi_t.  Returns the failure reason, or empty on
// convergence; updates state/report in place only on accepted iterates.
std::string newton_at_fixed_t(const ProblemSpec& spec, const ScalarField& psi_t, double t,
                              const SolveOptions& opts, SolveState* state,
                              SolveReport* report) {
  ScalarField u = state->u;
  ResidualEval ev = eval_residual(spec, u, psi_t);
  if (!ev.admissible)
    return "iterate inadmissible at " + node_label(spec.grid, ev.first_bad_node);
  int iters = 0;
  while (ev.max_norm > opts.tol_residual) {
    if (iters >= opts.max_newton) {
      std::ostringstream msg;
      msg << "Newton budget (" << opts.max_newton << ") exhausted at t = " << t
          << " with residual " << ev.max_norm;
      return msg.str();
    }
    try {
      auto [direction, predicted] = newton_step(spec, u, psi_t, opts.linear,
                                                &report->last_linear);
      (void)predicted;
      LineSearchResult ls =
          line_search_admissible(spec, u, ev.max_norm, direction, psi_t, opts);
      u = std::move(ls.u);
      ev.max_norm = ls.residual_norm;  // the line search verified admissibility
      ++iters;
    } catch (const std::exception& e) {
      return e.what();
    }
  }
  state->u = std::move(u);
  state->t = t;
  state->residual_norm = ev.max_norm;
  state->newton_iters += iters;
  state->admissible = true;
  report->total_newton += iters;
  report->trace.push_back({t, iters, ev.max_norm});
  report->last_good_t = t;
  return {};
}

}  // namespace

SolveOutcome solve_continuation(const ProblemSpec& spec, const SolveOptions& opts) {
  validate_problem(spec);

  SolveOutcome out;
  SolveState& state = out.state;
  SolveReport& report = out.report;

  const ScalarField psi0 = initial_psi(spec);
  for (long flat = 0; flat < spec.grid.total(); ++flat)
    if (psi0.values[flat] < spec.psi.values[flat] - 1e-10) ++report.psi0_below_target;

  state.u = apply_dirichlet(spec.usub, spec.phi);
  state.t = 0.0;
  state.admissible = true;

  double dt = 1.0 / opts.continuation_steps;
  const double dt_min = 1.0 / opts.max_continuation_steps;
  double t = 0.0;
  while (t < 1.0) {
    const double t_next = std::min(1.0, t + dt);
    const ScalarField psi_t = blend_psi(psi0, spec.psi, t_next);
    SolveState attempt = state;
    const std::string failure =
        newton_at_fixed_t(spec, psi_t, t_next, opts, &attempt, &report);
    if (failure.empty()) {
      state = std::move(attempt);
      t = t_next;
      continue;
    }
    dt *= 0.5;
    if (dt < dt_min) {
      std::ostringstream msg;
      msg << "continuation failed below minimum step " << dt_min << " at t = " << t_next
          << ": " << failure;
      report.failure = msg.str();
      report.converged = false;
      return out;
    }
  }

  report.converged = true;
  return out;
}

ProblemSpec mms_generate(MetricPtr metric, FormSampler chi, AnalyticPtr u_star,
                         const GridSpec& grid) {
  if (!metric || !chi || !u_star) throw std::invalid_argument("mms_generate: missing inputs");
  if (metric->n() != grid.n || u_star->dims() != grid.axes())
    throw std::invalid_argument("mms_generate: dimension mismatch");

  ProblemSpec spec;
  spec.grid = grid;
  spec.metric = metric;
  spec.chi = chi;
  spec.psi = ScalarField::zeros(grid);
  for (long flat = 0; flat < grid.total(); ++flat) {
    const RVec z = grid.point_flat(flat);
    const HermitianMat g = metric->at(as_span(z));
    const HermitianMat c = chi(as_span(z));
    const HermitianMat hess = u_star->complex_hessian(as_span(z));
    const PointData probe{g, c, hess, 1.0};
    if (!(admissibility_margin(probe) > 0.0))
      throw std::invalid_argument("mms_generate: manufactured solution not admissible at " +
                                  node_label(grid, flat));
    spec.psi.values[flat] = equation_psi(g, c, hess);
  }
  const AnalyticPtr star = u_star;
  spec.phi = [star](std::span<const double> z) { return star->value(z); };
  spec.usub = ScalarField::sample(grid, *u_star);
  spec.usub_analytic = u_star;
  spec.u_star = u_star;
  return spec;
}

FormSampler make_form_sampler(const std::string& name, const std::vector<double>& params,
                              const MetricPtr& metric, int n) {
  if (name == "zero") {
    if (!params.empty()) throw std::invalid_argument("form sampler 'zero' takes no params");
    return [n](std::span<const double>) { return HermitianMat::Zero(n); };
  }
  if (name == "omega") {
    if (!params.empty()) throw std::invalid_argument("form sampler 'omega' takes no params");
    if (!metric) throw std::invalid_argument("form sampler 'omega' needs a metric");
    MetricPtr m = metric;
    return [m](std::span<const double> z) { return m->at(z); };
  }
  if (name == "identity-scaled") {
    if (params.size() > 1)
      throw std::invalid_argument("form sampler 'identity-scaled' takes at most one param");
    const double c = params.empty() ? 1.0 : params[0];
    return [n, c](std::span<const double>) {
      return HermitianMat::Symmetrized(c * CMat::Identity(n, n));
    };
  }
  throw std::invalid_argument("unknown form sampler '" + name +
                              "' (supported: zero, omega, identity-scaled)");
}

}  // namespace hma
