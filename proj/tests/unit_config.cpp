#include "hma/config.hpp"

#include "hma/field_io.hpp"

#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

using namespace hma;
using nlohmann::json;

namespace {

json minimal_config() {
  return json::parse(R"({
    "problem": {
      "n": 2, "m": 5,
      "box": {"lo": [0, 0, 0, 0], "hi": [1, 1, 1, 1]},
      "metric": {"name": "euclidean", "params": []},
      "chi": {"name": "zero", "params": []},
      "psi": {"kind": "mms", "u_star": {"name": "quad-psh", "params": [1.0]}},
      "phi": {"kind": "subsolution-trace"},
      "subsolution": {"kind": "u-star"}
    }
  })");
}

std::filesystem::path temp_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "hma-config-test";
  std::filesystem::create_directories(dir);
  return dir;
}

bool mentions(const ConfigError& e, const std::string& needle) {
  return std::any_of(e.violations.begin(), e.violations.end(), [&](const std::string& v) {
    return v.find(needle) != std::string::npos;
  });
}

}  // namespace

TEST_CASE("minimal mms config parses with defaults") {
  const ConfigDoc c = parse_config(minimal_config());
  CHECK(c.n == 2);
  CHECK(c.m == 5);
  CHECK(c.metric_name == "euclidean");
  CHECK(c.psi_kind == "mms");
  CHECK(c.u_star_name == "quad-psh");
  CHECK(c.subsolution_kind == "u-star");
  CHECK(c.theta == 0.05);
  CHECK(c.n_threshold == 10.0);
  CHECK(c.barrier_t == 0.5);
  CHECK(c.barrier_big_t == 2.0);
  CHECK(c.barrier_delta == 0.2);
  CHECK(c.output_dir == "out");
  CHECK(c.refine.empty());
  CHECK(c.solver.max_newton == 50);
}

TEST_CASE("every violation is reported in one pass") {
  json j = minimal_config();
  j["problem"]["m"] = 4;                       // even
  j["problem"]["metric"]["name"] = "warp";     // unknown metric
  j["problem"]["box"]["lo"] = {0, 0};          // wrong arity
  j["problem"]["stray"] = 1;                   // unknown key
  try {
    parse_config(j);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.violations.size() >= 4);
    CHECK(mentions(e, "m"));
    CHECK(mentions(e, "warp"));
    CHECK(mentions(e, "lo"));
    CHECK(mentions(e, "stray"));
  }
}

TEST_CASE("unknown keys are rejected at every level") {
  for (const char* path : {"/extra", "/problem/extra", "/problem/psi/extra",
                           "/solver/extra", "/verify/extra"}) {
    json j = minimal_config();
    j["solver"] = json::object();
    j["verify"] = json::object();
    j[json::json_pointer(path)] = 1;
    CHECK_THROWS_AS(parse_config(j), ConfigError);
  }
}

TEST_CASE("nonpositive constant psi is rejected as degenerate") {
  json j = minimal_config();
  j["problem"]["psi"] = {{"kind", "constant"}, {"value", 0.0}};
  j["problem"]["subsolution"] = {
      {"kind", "analytic"}, {"name", "quad-psh"}, {"params", {1.0}}};
  try {
    parse_config(j);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(mentions(e, "elliptic"));
  }
}

TEST_CASE("unknown metric violation lists the accepted names") {
  json j = minimal_config();
  j["problem"]["metric"]["name"] = "nope";
  try {
    parse_config(j);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(mentions(e, "euclidean"));
    CHECK(mentions(e, "conformal-exp"));
    CHECK(mentions(e, "diag-anisotropic"));
  }
}

TEST_CASE("u-star subsolution and mms psi go together") {
  json j = minimal_config();
  j["problem"]["psi"] = {{"kind", "constant"}, {"value", 1.0}};
  CHECK_THROWS_AS(parse_config(j), ConfigError);

  json j2 = minimal_config();
  j2["problem"]["subsolution"] = {
      {"kind", "analytic"}, {"name", "quad-psh"}, {"params", {1.0}}};
  CHECK_THROWS_AS(parse_config(j2), ConfigError);
}

TEST_CASE("refine lists must be valid grid sizes") {
  json j = minimal_config();
  j["problem"]["refine"] = {5, 9, 13};
  CHECK(parse_config(j).refine == std::vector<int>{5, 9, 13});

  j["problem"]["refine"] = {5, 8};
  CHECK_THROWS_AS(parse_config(j), ConfigError);
  j["problem"]["refine"] = {9, 5};  // not increasing
  CHECK_THROWS_AS(parse_config(j), ConfigError);
}

TEST_CASE("dotted overrides create paths and parse JSON values") {
  json j = minimal_config();
  apply_override(&j, "problem.m=9");
  CHECK(j["problem"]["m"] == 9);
  apply_override(&j, "verify.barrier.t=0.75");
  CHECK(j["verify"]["barrier"]["t"] == 0.75);
  apply_override(&j, "problem.refine=[5,9]");
  CHECK(j["problem"]["refine"] == json({5, 9}));
  apply_override(&j, "output_dir=run/out");  // not JSON: falls back to string
  CHECK(j["output_dir"] == "run/out");
  CHECK_THROWS_AS(apply_override(&j, "no-equals-sign"), ConfigError);

  const ConfigDoc c = parse_config(j);
  CHECK(c.m == 9);
  CHECK(c.barrier_t == 0.75);
  CHECK(c.output_dir == "run/out");
}

TEST_CASE("load_config reads files and reports missing ones") {
  const auto path = temp_dir() / "config.json";
  std::ofstream(path) << minimal_config().dump(2);
  const ConfigDoc c = load_config(path.string(), {"problem.m=7"});
  CHECK(c.m == 7);

  CHECK_THROWS_AS(load_config((temp_dir() / "missing.json").string()), ConfigError);

  const auto broken = temp_dir() / "broken.json";
  std::ofstream(broken) << "{ not json";
  CHECK_THROWS_AS(load_config(broken.string()), ConfigError);
}

TEST_CASE("build_problem wires the mms pieces and honors m_override") {
  const ConfigDoc c = parse_config(minimal_config());
  const ProblemSpec spec = build_problem(c);
  CHECK(spec.grid.m == 5);
  CHECK(spec.u_star != nullptr);
  CHECK_NOTHROW(validate_problem(spec));
  for (long f = 0; f < spec.grid.total(); ++f)
    CHECK(spec.psi.at(f) == doctest::Approx(1.0).epsilon(1e-13));

  const ProblemSpec fine = build_problem(c, 9);
  CHECK(fine.grid.m == 9);
  CHECK(fine.grid.total() == 6561);  // 9^4
}

TEST_CASE("file-backed psi and subsolution round trip through field files") {
  const auto dir = temp_dir();
  const GridSpec grid = GridSpec::make(2, 5, RVec::Zero(4), RVec::Ones(4));

  // psi = 1 everywhere; subsolution |z|^2 sampled on the same grid.
  ScalarField psi = ScalarField::zeros(grid);
  for (long f = 0; f < grid.total(); ++f) psi.at(f) = 1.0;
  write_field(psi, "psi", (dir / "psi.field").string());
  const ScalarField usub = ScalarField::sample(grid, *make_analytic("quad-psh", {1.0}, 4));
  write_field(usub, "usub", (dir / "usub.field").string());

  json j = minimal_config();
  j["problem"]["psi"] = {{"kind", "file"}, {"path", (dir / "psi.field").string()}};
  j["problem"]["subsolution"] = {{"kind", "file"}, {"path", (dir / "usub.field").string()}};

  const ConfigDoc c = parse_config(j);
  const ProblemSpec spec = build_problem(c);
  CHECK_NOTHROW(validate_problem(spec));
  for (long f = 0; f < grid.total(); ++f) CHECK(spec.usub.at(f) == usub.at(f));

  // A stored field on a different grid than the config cannot be used.
  const GridSpec other = GridSpec::make(2, 7, RVec::Zero(4), RVec::Ones(4));
  write_field(ScalarField::zeros(other), "psi", (dir / "psi7.field").string());
  json j2 = minimal_config();
  j2["problem"]["psi"] = {{"kind", "file"}, {"path", (dir / "psi7.field").string()}};
  j2["problem"]["subsolution"] = {{"kind", "file"}, {"path", (dir / "usub.field").string()}};
  const ConfigDoc c2 = parse_config(j2);
  CHECK_THROWS(build_problem(c2));

  // Missing the backing file is a construction-time error too.
  json j3 = minimal_config();
  j3["problem"]["psi"] = {{"kind", "file"}, {"path", (dir / "absent.field").string()}};
  j3["problem"]["subsolution"] = {{"kind", "file"}, {"path", (dir / "usub.field").string()}};
  CHECK_THROWS(build_problem(parse_config(j3)));
}

TEST_CASE("m_override replaces the grid for mms studies only where sensible") {
  json j = minimal_config();
  j["problem"]["refine"] = {5, 9};
  const ConfigDoc c = parse_config(j);
  CHECK(build_problem(c, 9).grid.m == 9);
  CHECK_THROWS_AS(build_problem(c, 4), std::invalid_argument);
}
