#include "hma/report.hpp"

#include <filesystem>
#include <fstream>
#include <vector>

namespace hma {

using nlohmann::ordered_json;

ordered_json grid_metadata_json(const GridSpec& g) {
  ordered_json j;
  j["n"] = g.n;
  j["m"] = g.m;
  j["lo"] = std::vector<double>(g.lo.data(), g.lo.data() + g.lo.size());
  j["hi"] = std::vector<double>(g.hi.data(), g.hi.data() + g.hi.size());
  j["total_nodes"] = g.total();
  j["interior_nodes"] = g.interior_count();
  return j;
}

ordered_json solve_report_json(const SolveReport& r) {
  ordered_json j;
  j["converged"] = r.converged;
  j["failure"] = r.failure;
  j["last_good_t"] = r.last_good_t;
  j["total_newton"] = r.total_newton;
  j["psi0_below_target"] = r.psi0_below_target;
  j["linear_method"] = r.last_linear.method;
  j["linear_iterations"] = r.last_linear.iterations;
  j["linear_rel_residual"] = r.last_linear.rel_residual;
  ordered_json trace = ordered_json::array();
  for (const ContinuationStep& s : r.trace) {
    ordered_json step;
    step["t"] = s.t;
    step["newton_iters"] = s.newton_iters;
    step["residual"] = s.residual;
    trace.push_back(step);
  }
  j["trace"] = std::move(trace);
  return j;
}

ordered_json hypothesis_verdict_json(const HypothesisVerdict& v) {
  ordered_json j;
  j["admissibility_min"] = v.admissibility_min;
  j["subsolution_min"] = v.subsolution_min;
  j["cone_min"] = v.cone_min;
  j["epsilon"] = v.epsilon;
  return j;
}

ordered_json estimate_report_json(const EstimateReport& r) {
  ordered_json j;
  j["grad_interior_sup"] = r.ratios.grad_interior_sup;
  j["grad_boundary_sup"] = r.ratios.grad_boundary_sup;
  j["lap_interior_sup"] = r.ratios.lap_interior_sup;
  j["lap_boundary_sup"] = r.ratios.lap_boundary_sup;
  j["ratio_grad"] = r.ratios.ratio_grad;
  j["ratio_lap"] = r.ratios.ratio_lap;
  j["comparison_min"] = r.comparison.min_all;
  j["comparison_min_interior"] = r.comparison.min_interior;
  j["comparison_min_boundary"] = r.comparison.min_boundary;
  j["comparison_pass"] = r.comparison.pass;
  j.update(hypothesis_verdict_json(r.hypotheses));
  j["lemma21"] = {{"theta_used", r.lemma_theta},
                  {"N_used", r.lemma_n},
                  {"violations", r.lemma_violations}};
  j["barrier"] = {{"t", r.barrier.t},
                  {"T", r.barrier.big_t},
                  {"delta", r.barrier.delta},
                  {"min_margin", r.barrier.min_margin},
                  {"v_min", r.barrier.v_min},
                  {"collar_nodes", r.barrier.collar_nodes},
                  {"v_nonnegative", r.barrier.v_nonnegative}};
  return j;
}

ordered_json make_report_doc(const nlohmann::json& config_echo, const ordered_json& grid_meta,
                             const ordered_json& solve, const ordered_json& estimates,
                             double wall_seconds, const std::string& outcome,
                             const std::string& detail) {
  ordered_json j;
  j["outcome"] = outcome;
  if (!detail.empty()) j["detail"] = detail;
  j["timing_seconds"] = wall_seconds;
  j["grid"] = grid_meta;
  j["solve"] = solve;
  j["estimates"] = estimates;
  j["config"] = config_echo;
  return j;
}

void write_json_file(const std::string& path, const nlohmann::json& doc) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw std::runtime_error("write_json_file: cannot open '" + path + "'");
  out << doc.dump(2) << '\n';
  if (!out) throw std::runtime_error("write_json_file: short write to '" + path + "'");
}

}  // namespace hma
