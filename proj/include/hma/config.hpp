// Config documents: strict schema validation (every violation reported, not
// just the first; unknown keys rejected), dotted-path overrides, and problem
// construction from validated configs.
//
// Schema (JSON):
//   {
//     "problem": {
//       "n": 2, "m": 9,
//       "box": {"lo": [..2n..], "hi": [..2n..]},
//       "metric": {"name": "...", "params": [...]},
//       "chi": {"name": "zero"|"omega"|"identity-scaled", "params": [...]},
//       "psi": {"kind": "constant", "value": v > 0}
//            | {"kind": "file", "path": "..."}
//            | {"kind": "mms", "u_star": {"name": "...", "params": [...]}},
//       "phi": {"kind": "subsolution-trace"},
//       "subsolution": {"kind": "analytic", "name": "...", "params": [...]}
//                    | {"kind": "u-star"}          (mms problems only)
//                    | {"kind": "file", "path": "..."},
//       "refine": [m1, m2, ...]                    (optional, mms studies)
//     },
//     "solver":  { tol_residual, max_newton, backtrack, min_step,
//                  continuation_steps, max_continuation_steps },   (optional)
//     "verify":  { "theta": .., "N": ..,
//                  "barrier": {"t": .., "T": .., "delta": ..} },   (optional)
//     "output_dir": "..."                                          (optional)
//   }
#pragma once

#include "hma/solver.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace hma {

// Carries every schema violation found in one pass.
struct ConfigError : std::runtime_error {
  explicit ConfigError(std::vector<std::string> violations);
  std::vector<std::string> violations;
};

struct ConfigDoc {
  int n = 0;
  int m = 0;
  RVec lo, hi;
  std::string metric_name;
  std::vector<double> metric_params;
  std::string chi_name;
  std::vector<double> chi_params;

  std::string psi_kind;  // constant | file | mms
  double psi_value = 0.0;
  std::string psi_path;
  std::string u_star_name;
  std::vector<double> u_star_params;

  std::string phi_kind;          // subsolution-trace
  std::string subsolution_kind;  // analytic | u-star | file
  std::string subsolution_name;
  std::vector<double> subsolution_params;
  std::string subsolution_path;

  std::vector<int> refine;

  SolveOptions solver;

  double theta = 0.05;
  double n_threshold = 10.0;
  double barrier_t = 0.5;
  double barrier_big_t = 2.0;
  double barrier_delta = 0.2;

  std::string output_dir = "out";

  nlohmann::json echo;  // the validated document, verbatim
};

// Parses and validates; throws ConfigError listing every violation.
ConfigDoc parse_config(const nlohmann::json& j);

// Reads the file, parses JSON, applies overrides ("dotted.path=json-value",
// value parsed as JSON when possible, as a string otherwise), then validates.
ConfigDoc load_config(const std::string& path, const std::vector<std::string>& overrides = {});

// Sets a dotted-path key in the document, creating objects along the way.
void apply_override(nlohmann::json* doc, const std::string& key_equals_value);

// Instantiates the problem, reading referenced field files.  m_override
// replaces problem.m (refinement studies); 0 keeps the configured value.
ProblemSpec build_problem(const ConfigDoc& c, int m_override = 0);

}  // namespace hma
