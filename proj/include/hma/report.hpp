// Report documents: JSON serialization of solve traces, estimate reports,
// and grid metadata.  Every command run emits one report, failures included.
#pragma once

#include "hma/estimates.hpp"
#include "hma/solver.hpp"

#include "json.hpp"

#include <string>

namespace hma {

nlohmann::ordered_json grid_metadata_json(const GridSpec& g);
nlohmann::ordered_json solve_report_json(const SolveReport& r);
nlohmann::ordered_json hypothesis_verdict_json(const HypothesisVerdict& v);
nlohmann::ordered_json estimate_report_json(const EstimateReport& r);

// Full report document.  `estimates` and `solve` may be null (e.g. config
// failures); `outcome` is a short machine-checkable string such as
// "converged", "config-error", "solver-failure", "verification-failure".
nlohmann::ordered_json make_report_doc(const nlohmann::json& config_echo,
                                       const nlohmann::ordered_json& grid_meta,
                                       const nlohmann::ordered_json& solve,
                                       const nlohmann::ordered_json& estimates,
                                       double wall_seconds, const std::string& outcome,
                                       const std::string& detail = {});

// Writes pretty-printed JSON followed by a newline; creates parent
// directories as needed.
void write_json_file(const std::string& path, const nlohmann::json& doc);

}  // namespace hma
