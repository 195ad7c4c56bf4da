#include "hma/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hma {

namespace {

std::span<const double> as_span(const RVec& z) {
  return {z.data(), static_cast<size_t>(z.size())};
}

std::string node_label(const GridSpec& spec, long flat) {
  std::ostringstream os;
  os << "node " << flat << " at (";
  const RVec z = spec.point_flat(flat);
  for (int a = 0; a < z.size(); ++a) os << (a == 0 ? "" : ", ") << z[a];
  os << ")";
  return os.str();
}

HermitianMat usub_hessian(const ProblemSpec& spec, long flat) {
  if (spec.usub_analytic) {
    const RVec z = spec.grid.point_flat(flat);
    return spec.usub_analytic->complex_hessian(as_span(z));
  }
  return complex_hessian_flat(spec.usub, flat);
}

// Exact distance to the box boundary and the complex axis of the (first)
// minimizing face.
std::pair<double, int> boundary_distance(const GridSpec& grid, const RVec& z) {
  double sigma = std::numeric_limits<double>::infinity();
  int axis = 0;
  for (int a = 0; a < grid.axes(); ++a) {
    if (z[a] - grid.lo[a] < sigma) {
      sigma = z[a] - grid.lo[a];
      axis = a;
    }
    if (grid.hi[a] - z[a] < sigma) {
      sigma = grid.hi[a] - z[a];
      axis = a;
    }
  }
  return {sigma, axis / 2};
}

}  // namespace

HypothesisVerdict validate_hypotheses(const ProblemSpec& spec) {
  HypothesisVerdict v;
  v.admissibility_min = std::numeric_limits<double>::infinity();
  v.subsolution_min = std::numeric_limits<double>::infinity();
  v.cone_min = std::numeric_limits<double>::infinity();
  double lambda_min = std::numeric_limits<double>::infinity();
  double lambda_max = 0.0;
  for (long flat : spec.grid.interior_nodes()) {
    const RVec z = spec.grid.point_flat(flat);
    const PointData p{spec.metric->at(as_span(z)), spec.chi(as_span(z)),
                      usub_hessian(spec, flat), spec.psi.values[flat]};
    const Pencil pen = point_pencil(p);
    v.admissibility_min = std::min(v.admissibility_min, pen.min());
    v.subsolution_min = std::min(v.subsolution_min, subsolution_margin(p));
    v.cone_min = std::min(v.cone_min, cone_margin(p));
    lambda_min = std::min(lambda_min, pen.min());
    lambda_max = std::max(lambda_max, pen.max());
  }
  v.epsilon = std::min(lambda_min, 1.0 / lambda_max);
  return v;
}

ComparisonResult comparison_check(const ScalarField& u, const ScalarField& usub) {
  if (!(u.spec == usub.spec)) throw std::invalid_argument("comparison_check: grid mismatch");
  ComparisonResult res;
  res.min_all = std::numeric_limits<double>::infinity();
  res.min_interior = std::numeric_limits<double>::infinity();
  res.min_boundary = std::numeric_limits<double>::infinity();
  for (long flat = 0; flat < u.spec.total(); ++flat) {
    const double d = u.values[flat] - usub.values[flat];
    const bool interior = u.spec.is_interior_flat(flat);
    if (!interior && std::abs(d) > 1e-12)
      throw std::invalid_argument("comparison_check: boundary values differ at " +
                                  node_label(u.spec, flat));
    res.min_all = std::min(res.min_all, d);
    (interior ? res.min_interior : res.min_boundary) =
        std::min(interior ? res.min_interior : res.min_boundary, d);
  }
  res.pass = res.min_all >= -1e-8 && res.min_interior >= res.min_boundary - 1e-8;
  return res;
}

EstimateRatios estimate_ratios(const ScalarField& u, const ProblemSpec& spec) {
  if (!(u.spec == spec.grid)) throw std::invalid_argument("estimate_ratios: grid mismatch");
  EstimateRatios r;
  r.grad_interior_sup = gradient_sup(u, Region::Interior);
  r.grad_boundary_sup = gradient_sup(u, Region::Boundary);
  const ScalarField w = w_field(u, spec.chi, *spec.metric, BoundaryFill::NearestInterior);
  r.lap_interior_sup = -std::numeric_limits<double>::infinity();
  r.lap_boundary_sup = -std::numeric_limits<double>::infinity();
  for (long flat = 0; flat < w.spec.total(); ++flat) {
    double& sup = w.spec.is_interior_flat(flat) ? r.lap_interior_sup : r.lap_boundary_sup;
    sup = std::max(sup, w.values[flat]);
  }
  r.ratio_grad = r.grad_interior_sup / (1.0 + r.grad_boundary_sup);
  r.ratio_lap = r.lap_interior_sup / (1.0 + r.lap_boundary_sup);
  return r;
}

long lemma21_scan(const ScalarField& u, const ScalarField& usub, const ProblemSpec& spec,
                  double theta, double n_threshold) {
  if (!(u.spec == spec.grid) || !(usub.spec == spec.grid))
    throw std::invalid_argument("lemma21_scan: grid mismatch");
  long violations = 0;
  for (long flat : spec.grid.interior_nodes()) {
    const RVec z = spec.grid.point_flat(flat);
    const HermitianMat g = spec.metric->at(as_span(z));
    const HermitianMat chi = spec.chi(as_span(z));
    const PointData sol{g, chi, complex_hessian_flat(u, flat), spec.psi.values[flat]};
    if (!is_admissible(sol))
      throw std::domain_error("lemma21_scan: solution inadmissible at " +
                              node_label(spec.grid, flat));
    const double w = point_pencil(sol).sum();
    if (w < n_threshold) continue;
    const HermitianMat f = linearization_coeffs(sol);
    const HermitianMat diff = complex_hessian_flat(usub, flat) - sol.hess_u;
    const double margin = herm_inner(f, diff) - theta * (1.0 + herm_inner(f, g));
    if (margin < 0.0) ++violations;
  }
  return violations;
}

BarrierResult barrier_check(const ScalarField& u, const ScalarField& usub,
                            const ProblemSpec& spec, double t, double big_t, double delta) {
  if (!(u.spec == spec.grid) || !(usub.spec == spec.grid))
    throw std::invalid_argument("barrier_check: grid mismatch");
  if (!(t >= 0.0) || !(big_t >= 0.0) || !(delta > 0.0))
    throw std::invalid_argument("barrier_check: parameters must be nonnegative, delta > 0");
  const GridSpec& grid = spec.grid;
  double half_width = std::numeric_limits<double>::infinity();
  double h_max = 0.0;
  for (int a = 0; a < grid.axes(); ++a) {
    half_width = std::min(half_width, 0.5 * (grid.hi[a] - grid.lo[a]));
    h_max = std::max(h_max, grid.h(a));
  }
  if (delta > half_width) {
    std::ostringstream os;
    os << "barrier_check: delta " << delta << " exceeds the shortest half-width "
       << half_width;
    throw std::invalid_argument(os.str());
  }

  BarrierResult res;
  res.t = t;
  res.big_t = big_t;
  res.delta = delta;
  res.min_margin = std::numeric_limits<double>::infinity();
  res.v_min = std::numeric_limits<double>::infinity();

  const int n = grid.n;
  for (long flat : grid.interior_nodes()) {
    const RVec z = grid.point_flat(flat);
    const auto [sigma, face_axis] = boundary_distance(grid, z);
    if (!(sigma < delta)) continue;
    ++res.collar_nodes;

    const double v_val =
        (u.values[flat] - usub.values[flat]) + t * sigma - big_t * sigma * sigma;
    res.v_min = std::min(res.v_min, v_val);

    const PointData sol{spec.metric->at(as_span(z)), spec.chi(as_span(z)),
                        complex_hessian_flat(u, flat), spec.psi.values[flat]};
    if (!is_admissible(sol))
      throw std::domain_error("barrier_check: solution inadmissible at " +
                              node_label(grid, flat));
    const HermitianMat f = linearization_coeffs(sol);

    // Hess v = Hess(u - usub) + t * 0 - T * E_kk / 2 (sigma linear near the
    // minimizing face, so Hess sigma = 0 and Hess sigma^2 = E_kk / 2).
    const HermitianMat hess_diff = sol.hess_u - complex_hessian_flat(usub, flat);
    CMat corr = CMat::Zero(n, n);
    corr(face_axis, face_axis) = -0.5 * big_t;
    const HermitianMat hess_v = hess_diff + HermitianMat::Symmetrized(corr);

    const double margin = -herm_inner(f, hess_v) / (1.0 + herm_inner(f, sol.g));
    res.min_margin = std::min(res.min_margin, margin);
  }

  if (res.collar_nodes == 0) {
    std::ostringstream os;
    os << "barrier_check: empty collar (delta " << delta
       << " does not exceed the grid spacing " << h_max << ")";
    throw std::invalid_argument(os.str());
  }
  res.v_nonnegative = res.v_min >= -1e-10;
  return res;
}

std::vector<BarrierResult> barrier_sweep(const ScalarField& u, const ScalarField& usub,
                                         const ProblemSpec& spec) {
  const GridSpec& grid = spec.grid;
  double half_width = std::numeric_limits<double>::infinity();
  double h_max = 0.0;
  for (int a = 0; a < grid.axes(); ++a) {
    half_width = std::min(half_width, 0.5 * (grid.hi[a] - grid.lo[a]));
    h_max = std::max(h_max, grid.h(a));
  }
  std::set<double> deltas;
  for (double d : {1.5 * h_max, 2.5 * h_max, 0.1, 0.2})
    if (d > h_max && d <= half_width) deltas.insert(d);

  std::vector<BarrierResult> tried;
  for (double t : {0.25, 0.5, 1.0})
    for (double big_t : {1.0, 2.0, 4.0})
      for (double delta : deltas)
        tried.push_back(barrier_check(u, usub, spec, t, big_t, delta));
  return tried;
}

const BarrierResult* best_barrier(const std::vector<BarrierResult>& tried) {
  const BarrierResult* best = nullptr;
  for (const BarrierResult& b : tried) {
    if (best == nullptr) {
      best = &b;
      continue;
    }
    if (b.v_nonnegative != best->v_nonnegative) {
      if (b.v_nonnegative) best = &b;
      continue;
    }
    if (b.min_margin > best->min_margin) best = &b;
  }
  return best;
}

EstimateReport build_estimate_report(const ScalarField& u, const ProblemSpec& spec,
                                     double theta, double n_threshold, double t, double big_t,
                                     double delta) {
  EstimateReport rep;
  rep.ratios = estimate_ratios(u, spec);
  rep.hypotheses = validate_hypotheses(spec);
  rep.comparison = comparison_check(u, spec.usub);
  rep.lemma_theta = theta;
  rep.lemma_n = n_threshold;
  rep.lemma_violations = lemma21_scan(u, spec.usub, spec, theta, n_threshold);
  rep.barrier = barrier_check(u, spec.usub, spec, t, big_t, delta);
  return rep;
}

}  // namespace hma
