#include "hma/report.hpp"

#include "doctest.h"

#include <filesystem>
#include <fstream>

using namespace hma;
using nlohmann::json;

TEST_CASE("grid metadata serialization") {
  const GridSpec spec = GridSpec::make(2, 5, RVec::Zero(4), RVec::Ones(4));
  const json j = grid_metadata_json(spec);
  CHECK(j["n"] == 2);
  CHECK(j["m"] == 5);
  CHECK(j["lo"] == json({0.0, 0.0, 0.0, 0.0}));
  CHECK(j["hi"] == json({1.0, 1.0, 1.0, 1.0}));
  CHECK(j["total_nodes"] == 625);
  CHECK(j["interior_nodes"] == 81);
}

TEST_CASE("solve report serialization carries the trace") {
  SolveReport r;
  r.converged = true;
  r.total_newton = 3;
  r.last_good_t = 1.0;
  r.psi0_below_target = 0;
  r.trace = {{0.5, 2, 1e-11}, {1.0, 1, 2e-12}};
  r.last_linear = {"sparse-lu", 0, 3e-15};

  const json j = solve_report_json(r);
  CHECK(j["converged"] == true);
  CHECK(j["total_newton"] == 3);
  CHECK(j["trace"].size() == 2);
  CHECK(j["trace"][0]["t"] == 0.5);
  CHECK(j["trace"][0]["newton_iters"] == 2);
  CHECK(j["linear_method"] == "sparse-lu");
  CHECK(j["failure"] == "");
}

TEST_CASE("hypothesis verdict serialization") {
  HypothesisVerdict v;
  v.admissibility_min = 1.5;
  v.subsolution_min = 0.0;
  v.cone_min = 0.75;
  v.epsilon = 2.0 / 3.0;
  const json j = hypothesis_verdict_json(v);
  CHECK(j["admissibility_min"] == 1.5);
  CHECK(j["subsolution_min"] == 0.0);
  CHECK(j["cone_min"] == 0.75);
  CHECK(j["epsilon"] == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("report document structure") {
  const GridSpec spec = GridSpec::make(2, 5, RVec::Zero(4), RVec::Ones(4));
  const json doc = make_report_doc(json{{"echo", true}}, grid_metadata_json(spec), {}, {}, 1.25,
                                   "config-error", "bad things");
  CHECK(doc["outcome"] == "config-error");
  CHECK(doc["detail"] == "bad things");
  CHECK(doc["timing_seconds"] == 1.25);
  CHECK(doc["grid"]["m"] == 5);
  CHECK(doc["config"]["echo"] == true);
  CHECK(doc.contains("solve"));
  CHECK(doc.contains("estimates"));
}

TEST_CASE("json writer creates directories and terminates with a newline") {
  const auto dir = std::filesystem::temp_directory_path() / "hma-report-test" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  const auto path = dir / "report.json";
  write_json_file(path.string(), json{{"k", 1}});

  std::ifstream in(path);
  REQUIRE(bool(in));
  std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(json::parse(all) == json{{"k", 1}});
  REQUIRE(!all.empty());
  CHECK(all.back() == '\n');
}
