// Command-line driver for the Hermitian Monge-Ampère laboratory.
//
// Subcommands:
//   solve        continuation solve from a config; writes u.field + report.json
//   mms          manufactured-solution refinement study; writes mms.csv + report.json
//   verify       post-hoc verification of a stored solution field
//   lemma-check  Monte-Carlo calibration of the strict-concavity constants
//   geom-check   torsion/curvature/commutation residual suite for a metric
//
// Exit codes (stable contract):
//   0  success
//   1  configuration or usage error
//   2  solver failure
//   3  verification failure
//   4  concavity-scan violation

#include "hma/config.hpp"
#include "hma/estimates.hpp"
#include "hma/field_io.hpp"
#include "hma/geom.hpp"
#include "hma/lemma_mc.hpp"
#include "hma/report.hpp"
#include "hma/solver.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

using hma::ConfigDoc;
using hma::ProblemSpec;
using hma::ScalarField;
using nlohmann::ordered_json;

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kSolverFailure = 2;
constexpr int kVerificationFailure = 3;
constexpr int kLemmaViolation = 4;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct CommonArgs {
  std::string config_path;
  std::string out_dir;  // --out; empty means the config's output_dir (or "out")
  bool serial = false;  // execution is always serial; flag kept for script stability
  std::uint64_t seed = 12345;
  std::vector<std::string> overrides;
};

void add_common_flags(CLI::App* cmd, CommonArgs* args, bool needs_config) {
  auto* opt = cmd->add_option("--config", args->config_path, "JSON problem configuration");
  if (needs_config) opt->required();
  cmd->add_option("--out", args->out_dir, "output directory (overrides config output_dir)");
  cmd->add_flag("--serial", args->serial,
                "force bit-reproducible serial execution (execution is always serial)");
  cmd->add_option("--seed", args->seed, "seed for randomized commands");
  cmd->add_option("--override", args->overrides,
                  "dotted config override key=value (repeatable)");
}

std::string resolve_out(const CommonArgs& args, const std::string& config_out) {
  if (!args.out_dir.empty()) return args.out_dir;
  if (!config_out.empty()) return config_out;
  return "out";
}

void write_report(const std::string& out_dir, const nlohmann::json& echo,
                  const ordered_json& grid, const ordered_json& solve,
                  const ordered_json& estimates, double wall, const std::string& outcome,
                  const std::string& detail = {}) {
  try {
    hma::write_json_file(out_dir + "/report.json",
                         hma::make_report_doc(echo, grid, solve, estimates, wall, outcome,
                                              detail));
  } catch (const std::exception& e) {
    std::cerr << "error: could not write report: " << e.what() << "\n";
  }
}

// Loads and validates the config, printing every violation.  Returns false
// (and writes a failure report) when the config is unusable.
bool load_config_or_report(const CommonArgs& args, Clock::time_point t0, ConfigDoc* cfg) {
  try {
    *cfg = hma::load_config(args.config_path, args.overrides);
    return true;
  } catch (const hma::ConfigError& e) {
    for (const std::string& v : e.violations) std::cerr << "config: " << v << "\n";
    write_report(resolve_out(args, ""), {}, {}, {}, {}, seconds_since(t0), "config-error",
                 e.what());
    return false;
  }
}

double max_abs_error_vs(const ScalarField& u, const hma::AnalyticPtr& star) {
  double err = 0.0;
  for (long flat = 0; flat < u.spec.total(); ++flat) {
    const hma::RVec z = u.spec.point_flat(flat);
    err = std::max(err, std::abs(u.values[flat] -
                                 star->value({z.data(), static_cast<size_t>(z.size())})));
  }
  return err;
}

// Estimate report with a barrier fallback: when the configured (t, T, delta)
// is infeasible on this grid, take the best sweep entry instead and note it.
hma::EstimateReport compute_estimates(const ScalarField& u, const ProblemSpec& spec,
                                      const ConfigDoc& cfg, std::string* barrier_note) {
  hma::EstimateReport rep;
  rep.ratios = hma::estimate_ratios(u, spec);
  rep.hypotheses = hma::validate_hypotheses(spec);
  rep.comparison = hma::comparison_check(u, spec.usub);
  rep.lemma_theta = cfg.theta;
  rep.lemma_n = cfg.n_threshold;
  rep.lemma_violations = hma::lemma21_scan(u, spec.usub, spec, cfg.theta, cfg.n_threshold);
  try {
    rep.barrier =
        hma::barrier_check(u, spec.usub, spec, cfg.barrier_t, cfg.barrier_big_t,
                           cfg.barrier_delta);
  } catch (const std::invalid_argument& e) {
    const std::vector<hma::BarrierResult> sweep = hma::barrier_sweep(u, spec.usub, spec);
    if (const hma::BarrierResult* best = hma::best_barrier(sweep)) {
      rep.barrier = *best;
      *barrier_note = std::string("configured barrier parameters were infeasible (") +
                      e.what() + "); reporting the best sweep entry";
    } else {
      *barrier_note = std::string("barrier check unavailable: ") + e.what();
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

int cmd_solve(const CommonArgs& args) {
  const auto t0 = Clock::now();
  ConfigDoc cfg;
  if (!load_config_or_report(args, t0, &cfg)) return kConfigError;
  const std::string out = resolve_out(args, cfg.output_dir);

  ProblemSpec spec;
  try {
    spec = hma::build_problem(cfg);
    hma::validate_problem(spec);
  } catch (const std::exception& e) {
    std::cerr << "problem setup: " << e.what() << "\n";
    write_report(out, cfg.echo, {}, {}, {}, seconds_since(t0), "config-error", e.what());
    return kConfigError;
  }

  const hma::HypothesisVerdict verdict = hma::validate_hypotheses(spec);
  if (verdict.cone_min <= 0.0 || verdict.subsolution_min < -1e-10)
    std::cerr << "warning: subsolution hypothesis margins are not all positive"
              << " (subsolution_min " << verdict.subsolution_min << ", cone_min "
              << verdict.cone_min << "); recording the verdict and solving anyway\n";

  const hma::SolveOutcome outcome = hma::solve_continuation(spec, cfg.solver);
  ordered_json solve_json = hma::solve_report_json(outcome.report);

  if (spec.u_star) {
    const double err = max_abs_error_vs(outcome.state.u, spec.u_star);
    solve_json["max_error_vs_u_star"] = err;
    std::cout << "max error vs u*: " << err << "\n";
  }

  ordered_json est_json = hma::hypothesis_verdict_json(verdict);
  std::string detail;
  if (outcome.report.converged) {
    try {
      std::string barrier_note;
      const hma::EstimateReport est = compute_estimates(outcome.state.u, spec, cfg,
                                                        &barrier_note);
      est_json = hma::estimate_report_json(est);
      if (!barrier_note.empty()) est_json["barrier_note"] = barrier_note;
    } catch (const std::exception& e) {
      detail = std::string("estimates unavailable: ") + e.what();
      std::cerr << "warning: " << detail << "\n";
    }
  }

  try {
    hma::write_field(outcome.state.u, "u", out + "/u.field");
  } catch (const std::exception& e) {
    std::cerr << "error: could not write solution field: " << e.what() << "\n";
    write_report(out, cfg.echo, hma::grid_metadata_json(spec.grid), solve_json, est_json,
                 seconds_since(t0), "io-error", e.what());
    return kConfigError;
  }

  const bool ok = outcome.report.converged;
  write_report(out, cfg.echo, hma::grid_metadata_json(spec.grid), solve_json, est_json,
               seconds_since(t0), ok ? "converged" : "solver-failure",
               ok ? detail : outcome.report.failure);
  if (ok) {
    std::cout << "converged: residual " << outcome.state.residual_norm << " after "
              << outcome.report.total_newton << " Newton iterations ("
              << outcome.report.trace.size() << " continuation steps)\n";
    return kOk;
  }
  std::cerr << "solver failure: " << outcome.report.failure << " (last good t "
            << outcome.report.last_good_t << ")\n";
  return kSolverFailure;
}

// ---------------------------------------------------------------------------
// mms
// ---------------------------------------------------------------------------

struct MmsRow {
  int m = 0;
  double h = 0.0;
  double max_error = 0.0;
  bool has_order = false;
  bool exact = false;
  double order = 0.0;
};

std::string mms_order_cell(const MmsRow& row) {
  if (row.exact) return "exact";
  if (!row.has_order) return "";
  std::ostringstream os;
  os.precision(17);
  os << row.order;
  return os.str();
}

void write_mms_csv(const std::string& path, const std::vector<MmsRow>& rows) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot open '" + path + "'");
  out << "m,h,max_error,observed_order\n";
  out.precision(17);
  for (const MmsRow& row : rows)
    out << row.m << "," << row.h << "," << row.max_error << "," << mms_order_cell(row)
        << "\n";
  if (!out) throw std::runtime_error("short write to '" + path + "'");
}

int cmd_mms(const CommonArgs& args) {
  const auto t0 = Clock::now();
  ConfigDoc cfg;
  if (!load_config_or_report(args, t0, &cfg)) return kConfigError;
  const std::string out = resolve_out(args, cfg.output_dir);

  if (cfg.psi_kind != "mms") {
    const std::string msg = "mms command needs psi.kind == \"mms\" (got \"" + cfg.psi_kind +
                            "\")";
    std::cerr << "config: " << msg << "\n";
    write_report(out, cfg.echo, {}, {}, {}, seconds_since(t0), "config-error", msg);
    return kConfigError;
  }

  std::vector<int> ms = cfg.refine;
  if (ms.empty()) ms.push_back(cfg.m);

  std::vector<MmsRow> rows;
  ordered_json rows_json = ordered_json::array();
  ordered_json last_grid, last_solve;
  for (int m : ms) {
    ProblemSpec spec;
    try {
      spec = hma::build_problem(cfg, m);
      hma::validate_problem(spec);
    } catch (const std::exception& e) {
      std::cerr << "problem setup (m=" << m << "): " << e.what() << "\n";
      write_report(out, cfg.echo, last_grid, last_solve, {}, seconds_since(t0),
                   "config-error", e.what());
      return kConfigError;
    }
    const hma::SolveOutcome outcome = hma::solve_continuation(spec, cfg.solver);
    last_grid = hma::grid_metadata_json(spec.grid);
    last_solve = hma::solve_report_json(outcome.report);
    if (!outcome.report.converged) {
      std::cerr << "solver failure at m=" << m << ": " << outcome.report.failure << "\n";
      try {
        write_mms_csv(out + "/mms.csv", rows);
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
      }
      write_report(out, cfg.echo, last_grid, last_solve, {}, seconds_since(t0),
                   "solver-failure", outcome.report.failure);
      return kSolverFailure;
    }

    MmsRow row;
    row.m = m;
    row.h = 0.0;
    for (int a = 0; a < spec.grid.axes(); ++a) row.h = std::max(row.h, spec.grid.h(a));
    row.max_error = max_abs_error_vs(outcome.state.u, spec.u_star);
    row.exact = row.max_error <= 1e-8;
    if (!rows.empty() && !row.exact && !rows.back().exact) {
      row.has_order = true;
      row.order = std::log(rows.back().max_error / row.max_error) /
                  std::log(rows.back().h / row.h);
    }
    rows.push_back(row);

    ordered_json rj;
    rj["m"] = row.m;
    rj["h"] = row.h;
    rj["max_error"] = row.max_error;
    rj["observed_order"] = mms_order_cell(row);
    rows_json.push_back(rj);
    std::cout << "m=" << row.m << " h=" << row.h << " max_error=" << row.max_error
              << " order=" << (mms_order_cell(row).empty() ? "-" : mms_order_cell(row))
              << "\n";
  }

  try {
    write_mms_csv(out + "/mms.csv", rows);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    write_report(out, cfg.echo, last_grid, last_solve, {}, seconds_since(t0), "io-error",
                 e.what());
    return kConfigError;
  }

  const MmsRow& final_row = rows.back();
  const bool single = rows.size() == 1;
  const bool ok = single || final_row.exact || (final_row.has_order && final_row.order >= 1.8);
  ordered_json est_json;
  est_json["mms_rows"] = rows_json;
  write_report(out, cfg.echo, last_grid, last_solve, est_json, seconds_since(t0),
               ok ? "converged" : "verification-failure",
               ok ? "" : "final observed order below 1.8");
  if (!ok) {
    std::cerr << "verification failure: final observed order "
              << (final_row.has_order ? final_row.order : 0.0) << " below 1.8\n";
    return kVerificationFailure;
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct Offender {
  std::string kind;
  long flat = 0;
  std::string point;
  double value = 0.0;
};

std::string point_string(const hma::GridSpec& grid, long flat) {
  const hma::RVec z = grid.point_flat(flat);
  std::ostringstream os;
  os.precision(17);
  for (int a = 0; a < z.size(); ++a) os << (a == 0 ? "" : " ") << z[a];
  return os.str();
}

// Worst `keep` nodes by comparison deficit (u - usub ascending over all
// nodes) and by concavity margin (ascending over interior nodes above the
// trace threshold).
std::vector<Offender> collect_offenders(const ScalarField& u, const ProblemSpec& spec,
                                        double theta, double n_threshold, size_t keep) {
  std::vector<std::pair<double, long>> comparison;
  comparison.reserve(u.spec.total());
  for (long flat = 0; flat < u.spec.total(); ++flat)
    comparison.emplace_back(u.values[flat] - spec.usub.values[flat], flat);
  std::sort(comparison.begin(), comparison.end());

  std::vector<std::pair<double, long>> lemma;
  for (long flat : spec.grid.interior_nodes()) {
    const hma::RVec z = spec.grid.point_flat(flat);
    const std::span<const double> zs{z.data(), static_cast<size_t>(z.size())};
    const hma::HermitianMat g = spec.metric->at(zs);
    const hma::PointData sol{g, spec.chi(zs), hma::complex_hessian_flat(u, flat),
                             spec.psi.values[flat]};
    if (!hma::is_admissible(sol)) continue;  // reported through lemma21_scan
    if (hma::point_pencil(sol).sum() < n_threshold) continue;
    const hma::HermitianMat f = hma::linearization_coeffs(sol);
    const hma::HermitianMat diff =
        hma::complex_hessian_flat(spec.usub, flat) - sol.hess_u;
    const double margin =
        hma::herm_inner(f, diff) - theta * (1.0 + hma::herm_inner(f, g));
    lemma.emplace_back(margin, flat);
  }
  std::sort(lemma.begin(), lemma.end());

  std::vector<Offender> out;
  for (size_t i = 0; i < comparison.size() && i < keep; ++i)
    out.push_back({"comparison", comparison[i].second,
                   point_string(spec.grid, comparison[i].second), comparison[i].first});
  for (size_t i = 0; i < lemma.size() && i < keep; ++i)
    out.push_back({"concavity", lemma[i].second, point_string(spec.grid, lemma[i].second),
                   lemma[i].first});
  return out;
}

void write_offenders_csv(const std::string& path, const std::vector<Offender>& offenders) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot open '" + path + "'");
  out << "kind,flat_index,point,value\n";
  out.precision(17);
  for (const Offender& o : offenders)
    out << o.kind << "," << o.flat << "," << o.point << "," << o.value << "\n";
  if (!out) throw std::runtime_error("short write to '" + path + "'");
}

int cmd_verify(const CommonArgs& args, const std::string& u_path_arg) {
  const auto t0 = Clock::now();
  ConfigDoc cfg;
  if (!load_config_or_report(args, t0, &cfg)) return kConfigError;
  const std::string out = resolve_out(args, cfg.output_dir);
  const std::string u_path = u_path_arg.empty() ? out + "/u.field" : u_path_arg;

  ProblemSpec spec;
  try {
    spec = hma::build_problem(cfg);
    hma::validate_problem(spec);
  } catch (const std::exception& e) {
    std::cerr << "problem setup: " << e.what() << "\n";
    write_report(out, cfg.echo, {}, {}, {}, seconds_since(t0), "config-error", e.what());
    return kConfigError;
  }

  hma::NamedField stored;
  try {
    stored = hma::read_field(u_path);
  } catch (const std::exception& e) {
    std::cerr << "solution field '" << u_path << "': " << e.what() << "\n";
    write_report(out, cfg.echo, hma::grid_metadata_json(spec.grid), {}, {},
                 seconds_since(t0), "config-error", e.what());
    return kConfigError;
  }
  if (!(stored.field.spec == spec.grid)) {
    const std::string msg = "solution field grid does not match the configured problem";
    std::cerr << msg << " ('" << u_path << "')\n";
    write_report(out, cfg.echo, hma::grid_metadata_json(spec.grid), {}, {},
                 seconds_since(t0), "config-error", msg);
    return kConfigError;
  }
  const ScalarField& u = stored.field;

  std::string barrier_note;
  hma::EstimateReport est;
  try {
    est = compute_estimates(u, spec, cfg, &barrier_note);
  } catch (const std::exception& e) {
    // Boundary mismatches and inadmissible solution nodes land here: the
    // stored field is not a solution of this problem.
    std::cerr << "verification failure: " << e.what() << "\n";
    write_report(out, cfg.echo, hma::grid_metadata_json(spec.grid), {}, {},
                 seconds_since(t0), "verification-failure", e.what());
    return kVerificationFailure;
  }

  try {
    write_offenders_csv(out + "/offenders.csv",
                        collect_offenders(u, spec, cfg.theta, cfg.n_threshold, 10));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }

  ordered_json est_json = hma::estimate_report_json(est);
  if (!barrier_note.empty()) est_json["barrier_note"] = barrier_note;
  if (spec.u_star) est_json["max_error_vs_u_star"] = max_abs_error_vs(u, spec.u_star);

  const bool ok = est.comparison.pass && est.lemma_violations == 0;
  std::ostringstream detail;
  if (!est.comparison.pass) detail << "comparison principle violated (min "
                                   << est.comparison.min_all << "); ";
  if (est.lemma_violations > 0)
    detail << est.lemma_violations << " concavity-margin violations";
  write_report(out, cfg.echo, hma::grid_metadata_json(spec.grid), {}, est_json,
               seconds_since(t0), ok ? "verified" : "verification-failure", detail.str());
  std::cout << "comparison: " << (est.comparison.pass ? "PASS" : "FAIL") << " (min "
            << est.comparison.min_all << ")\n"
            << "concavity scan: " << est.lemma_violations << " violations at theta "
            << est.lemma_theta << ", N " << est.lemma_n << "\n"
            << "barrier: c0 " << est.barrier.min_margin << " (v_min " << est.barrier.v_min
            << ", " << est.barrier.collar_nodes << " collar nodes)\n";
  if (!ok) {
    std::cerr << "verification failure: " << detail.str() << "\n";
    return kVerificationFailure;
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// lemma-check
// ---------------------------------------------------------------------------

struct LemmaArgs {
  int n = 2;
  double epsilon = 0.5;
  double sup_psi = 1.0;
  long samples = 100000;
  long pilot = 20000;
  double force_theta = std::numeric_limits<double>::quiet_NaN();
  double force_n = std::numeric_limits<double>::quiet_NaN();
};

int cmd_lemma_check(const CommonArgs& args, const LemmaArgs& la) {
  const auto t0 = Clock::now();
  const std::string out = resolve_out(args, "");
  if (la.n < 2 || la.n > 4) {
    std::cerr << "lemma-check: n must be in {2, 3, 4}\n";
    write_report(out, {}, {}, {}, {}, seconds_since(t0), "config-error",
                 "n must be in {2, 3, 4}");
    return kConfigError;
  }

  hma::LemmaMcOptions opt;
  opt.n = la.n;
  opt.epsilon = la.epsilon;
  opt.sup_psi = la.sup_psi;
  opt.samples = la.samples;
  opt.pilot = la.pilot;
  opt.seed = args.seed;
  opt.force_theta = la.force_theta;
  opt.force_n = la.force_n;

  hma::LemmaMcResult res;
  try {
    res = hma::lemma21_monte_carlo(opt);
  } catch (const std::exception& e) {
    std::cerr << "lemma-check: " << e.what() << "\n";
    write_report(out, {}, {}, {}, {}, seconds_since(t0), "config-error", e.what());
    return kConfigError;
  }

  ordered_json est;
  est["lemma21"] = {{"n", la.n},
                    {"epsilon", la.epsilon},
                    {"sup_psi", la.sup_psi},
                    {"samples", res.samples},
                    {"seed", args.seed},
                    {"theta_star", res.theta_star},
                    {"N_star", res.n_star},
                    {"min_ratio", res.min_ratio},
                    {"violations", res.violations},
                    {"forced", !std::isnan(la.force_theta) || !std::isnan(la.force_n)}};
  const bool ok = res.violations == 0;
  write_report(out, {}, {}, {}, est, seconds_since(t0), ok ? "verified" : "lemma-violation",
               ok ? "" : "concavity inequality violated at the checked constants");
  std::cout << "theta* = " << res.theta_star << ", N* = " << res.n_star << ", violations = "
            << res.violations << " / " << res.samples << " (min ratio " << res.min_ratio
            << ")\n";
  if (!ok) {
    std::cerr << "lemma-check: " << res.violations << " violations at theta "
              << res.theta_star << ", N " << res.n_star << "\n";
    return kLemmaViolation;
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// geom-check
// ---------------------------------------------------------------------------

struct GeomArgs {
  std::string metric = "euclidean";
  std::vector<double> params;
  int n = 2;
  int points = 100;
};

int cmd_geom_check(const CommonArgs& args, const GeomArgs& ga) {
  const auto t0 = Clock::now();
  const std::string out = resolve_out(args, "");

  hma::MetricPtr metric;
  try {
    metric = hma::make_builtin_metric(ga.metric, ga.params, ga.n);
  } catch (const std::exception& e) {
    std::cerr << "geom-check: " << e.what() << "\n";
    write_report(out, {}, {}, {}, {}, seconds_since(t0), "config-error", e.what());
    return kConfigError;
  }
  if (ga.points < 1) {
    std::cerr << "geom-check: --points must be positive\n";
    write_report(out, {}, {}, {}, {}, seconds_since(t0), "config-error",
                 "--points must be positive");
    return kConfigError;
  }

  // Test-function family with analytic third derivatives (dimension-aware).
  std::vector<hma::AnalyticPtr> functions;
  functions.push_back(hma::make_analytic("quad-smooth", {0.3}, 2 * ga.n));
  if (ga.n >= 2) {
    functions.push_back(hma::make_analytic("cubic-mix", {}, 2 * ga.n));
    functions.push_back(hma::make_analytic("exp-cos", {0.4, 0.7}, 2 * ga.n));
  } else {
    functions.push_back(hma::make_analytic("quad-psh", {0.8}, 2 * ga.n));
    functions.push_back(hma::make_analytic("quad-diag", {1.0, 0.5}, 2 * ga.n));
  }

  std::mt19937_64 rng(args.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);

  double max_gamma = 0.0, max_torsion = 0.0, max_curvature = 0.0;
  double antisym = 0.0, herm_sym = 0.0, commutation = 0.0;
  std::vector<double> z(2 * ga.n);
  for (int p = 0; p < ga.points; ++p) {
    for (double& c : z) c = unif(rng);
    const hma::ConnectionCoeffs gamma = hma::chern_connection(*metric, z);
    const hma::TorsionTensor tor = hma::torsion(*metric, z);
    const hma::CurvatureTensor curv = hma::curvature(*metric, z);
    for (int i = 0; i < ga.n; ++i) {
      max_gamma = std::max(max_gamma, gamma.gamma[i].cwiseAbs().maxCoeff());
      max_torsion = std::max(max_torsion, tor.up[i].cwiseAbs().maxCoeff());
      antisym = std::max(antisym,
                         (tor.up[i] + tor.up[i].transpose()).cwiseAbs().maxCoeff());
      for (int j = 0; j < ga.n; ++j) {
        max_curvature = std::max(max_curvature, curv.r[i][j].cwiseAbs().maxCoeff());
        herm_sym = std::max(
            herm_sym, (curv.r[i][j] - curv.r[j][i].adjoint()).cwiseAbs().maxCoeff());
      }
    }
    for (const hma::AnalyticPtr& v : functions)
      commutation = std::max(commutation, hma::commutation_residual(*metric, *v, z));
  }

  const double tol = 1e-10;
  const bool ok = antisym <= tol && herm_sym <= tol && commutation <= tol;
  ordered_json est;
  est["geom"] = {{"metric", ga.metric},
                 {"params", ga.params},
                 {"n", ga.n},
                 {"points", ga.points},
                 {"seed", args.seed},
                 {"max_gamma", max_gamma},
                 {"max_torsion", max_torsion},
                 {"max_curvature", max_curvature},
                 {"antisymmetry_residual", antisym},
                 {"hermitian_symmetry_residual", herm_sym},
                 {"commutation_residual", commutation},
                 {"tolerance", tol}};
  write_report(out, {}, {}, {}, est, seconds_since(t0), ok ? "verified" : "verification-failure",
               ok ? "" : "geometry residuals above tolerance");

  std::cout << "metric " << ga.metric << " (n=" << ga.n << ", " << ga.points
            << " points): max |Gamma| " << max_gamma << ", max |T| " << max_torsion
            << ", max |R| " << max_curvature << "\n"
            << "antisymmetry residual:       " << antisym << "\n"
            << "hermitian-symmetry residual: " << herm_sym << "\n"
            << "commutation residual:        " << commutation << "\n"
            << "geom-check: " << (ok ? "PASS" : "FAIL") << "\n";
  if (!ok) {
    std::cerr << "geom-check: residuals above " << tol << "\n";
    return kVerificationFailure;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dirichlet-problem laboratory for Hermitian Monge-Ampère-type equations"};
  app.require_subcommand(1);

  CommonArgs solve_args, mms_args, verify_args, lemma_args_common, geom_args_common;
  std::string verify_u_path;
  LemmaArgs lemma_args;
  GeomArgs geom_args;

  CLI::App* solve = app.add_subcommand("solve", "run the continuation solver on a config");
  add_common_flags(solve, &solve_args, true);

  CLI::App* mms = app.add_subcommand(
      "mms", "manufactured-solution refinement study (psi.kind == mms)");
  add_common_flags(mms, &mms_args, true);

  CLI::App* verify = app.add_subcommand("verify", "verify a stored solution field");
  add_common_flags(verify, &verify_args, true);
  verify->add_option("--u", verify_u_path, "solution field path (default <out>/u.field)");

  CLI::App* lemma = app.add_subcommand(
      "lemma-check", "Monte-Carlo calibration of the strict-concavity constants");
  add_common_flags(lemma, &lemma_args_common, false);
  lemma->add_option("--n", lemma_args.n, "complex dimension (2-4)");
  lemma->add_option("--epsilon", lemma_args.epsilon, "metric pinching constant in (0, 1]");
  lemma->add_option("--sup-psi", lemma_args.sup_psi, "upper bound for sampled psi");
  lemma->add_option("--samples", lemma_args.samples, "accepted samples in the main run");
  lemma->add_option("--pilot", lemma_args.pilot, "pilot draws for calibration");
  lemma->add_option("--theta", lemma_args.force_theta,
                    "skip calibration and verify at this theta");
  lemma->add_option("--N", lemma_args.force_n,
                    "skip calibration and verify at this trace threshold");

  CLI::App* geom = app.add_subcommand(
      "geom-check", "torsion/curvature/commutation residual suite for a metric");
  add_common_flags(geom, &geom_args_common, false);
  geom->add_option("--metric", geom_args.metric, "builtin metric name");
  geom->add_option("--params", geom_args.params, "metric parameters");
  geom->add_option("--n", geom_args.n, "complex dimension");
  geom->add_option("--points", geom_args.points, "random sample points");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (solve->parsed()) return cmd_solve(solve_args);
    if (mms->parsed()) return cmd_mms(mms_args);
    if (verify->parsed()) return cmd_verify(verify_args, verify_u_path);
    if (lemma->parsed()) return cmd_lemma_check(lemma_args_common, lemma_args);
    if (geom->parsed()) return cmd_geom_check(geom_args_common, geom_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;
}
