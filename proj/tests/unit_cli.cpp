#include "doctest.h"

#include "json.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#ifndef HMA_CLI_PATH
#error "HMA_CLI_PATH must point at the command-line binary"
#endif

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

int run(const std::string& args) {
  const std::string cmd = std::string(HMA_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "hma-cli-test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_quad_config(const fs::path& dir, double c = 1.0) {
  const json cfg = {
      {"problem",
       {{"n", 2},
        {"m", 5},
        {"box", {{"lo", {0, 0, 0, 0}}, {"hi", {1, 1, 1, 1}}}},
        {"metric", {{"name", "euclidean"}, {"params", json::array()}}},
        {"chi", {{"name", "zero"}, {"params", json::array()}}},
        {"psi", {{"kind", "mms"}, {"u_star", {{"name", "quad-psh"}, {"params", {c}}}}}},
        {"phi", {{"kind", "subsolution-trace"}}},
        {"subsolution", {{"kind", "u-star"}}}}}};
  const fs::path path = dir / "config.json";
  std::ofstream(path) << cfg.dump(2);
  return path;
}

json read_report(const fs::path& out_dir) {
  std::ifstream in(out_dir / "report.json");
  REQUIRE(bool(in));
  return json::parse(in);
}

}  // namespace

TEST_CASE("cli: solve writes the solution and report") {
  const fs::path dir = fresh_dir("solve");
  const fs::path cfg = write_quad_config(dir);
  const fs::path out = dir / "out";
  CHECK(run("solve --config " + cfg.string() + " --out " + out.string()) == 0);
  CHECK(fs::exists(out / "u.field"));
  const json report = read_report(out);
  CHECK(report["outcome"] == "converged");
  CHECK(report["solve"]["converged"] == true);
  CHECK(report["estimates"]["comparison_pass"] == true);
  CHECK(report["solve"]["max_error_vs_u_star"].get<double>() < 1e-10);
}

TEST_CASE("cli: missing or invalid config is a usage error with a report") {
  const fs::path dir = fresh_dir("bad-config");
  const fs::path out = dir / "out";
  CHECK(run("solve --config " + (dir / "absent.json").string() + " --out " + out.string()) ==
        1);
  CHECK(read_report(out)["outcome"] == "config-error");

  CHECK(run("solve --out " + out.string()) == 1);  // --config flag missing entirely
  CHECK(run("no-such-command") == 1);
}

TEST_CASE("cli: verify accepts the solve output and rejects a mismatched grid") {
  const fs::path dir = fresh_dir("verify");
  const fs::path cfg = write_quad_config(dir);
  const fs::path out = dir / "out";
  REQUIRE(run("solve --config " + cfg.string() + " --out " + out.string()) == 0);
  CHECK(run("verify --config " + cfg.string() + " --out " + out.string()) == 0);
  CHECK(fs::exists(out / "offenders.csv"));

  // Same field against a refined config: grid mismatch is a usage error.
  CHECK(run("verify --config " + cfg.string() + " --out " + out.string() +
            " --override problem.m=7") == 1);
}

TEST_CASE("cli: mms on an exact instance reports an exact row") {
  const fs::path dir = fresh_dir("mms");
  const fs::path cfg = write_quad_config(dir);
  const fs::path out = dir / "out";
  CHECK(run("mms --config " + cfg.string() + " --out " + out.string()) == 0);
  CHECK(fs::exists(out / "mms.csv"));
  const json report = read_report(out);
  CHECK(report["outcome"] == "converged");

  std::ifstream csv(out / "mms.csv");
  std::string header, row;
  REQUIRE(std::getline(csv, header));
  CHECK(header == "m,h,max_error,observed_order");
  REQUIRE(std::getline(csv, row));
  CHECK(row.find("exact") != std::string::npos);
}

TEST_CASE("cli: forced lemma constants above the feasible band exit with the violation code") {
  const fs::path dir = fresh_dir("lemma");
  const fs::path out = dir / "out";
  CHECK(run("lemma-check --n 2 --samples 500 --pilot 200 --out " + out.string()) == 0);
  CHECK(run("lemma-check --n 2 --samples 500 --theta 0.5 --out " + out.string()) == 4);
  CHECK(read_report(out)["outcome"] == "lemma-violation");
  CHECK(run("lemma-check --n 5 --samples 100 --out " + out.string()) == 1);
}

TEST_CASE("cli: geom-check validates builtin metrics and rejects unknown ones") {
  const fs::path dir = fresh_dir("geom");
  const fs::path out = dir / "out";
  CHECK(run("geom-check --metric euclidean --points 5 --out " + out.string()) == 0);
  CHECK(read_report(out)["outcome"] == "verified");
  CHECK(run("geom-check --metric warp --points 5 --out " + out.string()) == 1);
}
