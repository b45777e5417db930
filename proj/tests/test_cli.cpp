// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cornerflow/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path scenario_dir{CORNERFLOW_SCENARIO_DIR};

const fs::path scratch_root = fs::temp_directory_path() / ("cornerflow_cli_test_" + std::to_string(::getpid()));

struct ScratchCleanup {
  ~ScratchCleanup() {
    std::error_code ec;
    fs::remove_all(scratch_root, ec);
  }
} cleanup;

fs::path scratch(const std::string& name) {
  const fs::path p = scratch_root / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

struct Run {
  int code;
  std::string out, err;
};

Run cli(const std::string& args, const fs::path& dir) {
  const fs::path out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd = std::string("\"") + CORNERFLOW_CLI + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                          err.string() + "\"";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

std::vector<std::vector<double>> read_csv(const fs::path& p, std::string& header) {
  std::ifstream in(p);
  std::getline(in, header);
  std::vector<std::vector<double>> rows;
  for (std::string line; std::getline(in, line);) {
    std::vector<double> row;
    std::stringstream s(line);
    for (std::string cell; std::getline(s, cell, ',');) row.push_back(std::strtod(cell.c_str(), nullptr));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

TEST_CASE("every bundled scenario validates and normalises idempotently") {
  std::size_t count = 0;
  for (const auto& entry : fs::directory_iterator(scenario_dir)) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().string());
    ++count;
    const std::string normal = cornerflow::validate_scenario(slurp(entry.path()));
    CHECK(cornerflow::validate_scenario(normal) == normal);
    CHECK(json::parse(normal).at("schema_version") == 1);
  }
  CHECK(count >= 9);
}

TEST_CASE("config errors exit 2 and name the line") {
  const fs::path dir = scratch("config");
  write(dir / "bad.json", "{\n  \"schema_version\": 1,\n  \"name\": \"bad\",\n  \"body\": {\"type\": \"circle\", \"radius\": -1}\n}\n");
  const auto r = cli("run \"" + (dir / "bad.json").string() + "\" --out \"" + (dir / "o").string() + "\"", dir);
  CHECK(r.code == 2);
  CHECK(r.err.find("line 4") != std::string::npos);
  CHECK(r.err.find("body.radius") != std::string::npos);
  const auto bad = json::parse(slurp(dir / "o" / "summary.json"));
  CHECK(bad["status"] == "config_error");
  CHECK(bad["error"]["line"] == 4);

  write(dir / "unknown.json", R"({"schema_version": 1, "name": "u", "body": {"type": "circle", "radius": 1}, "flw": {}})");
  CHECK(cli("validate \"" + (dir / "unknown.json").string() + "\"", dir).code == 2);

  write(dir / "syntax.json", "{\"schema_version\": 1,");
  CHECK(cli("validate \"" + (dir / "syntax.json").string() + "\"", dir).code == 2);
  CHECK(cli("validate \"" + (dir / "missing.json").string() + "\"", dir).code == 2);
  CHECK(cli("frobnicate", dir).code == 2);

  try {
    cornerflow::validate_scenario(slurp(scenario_dir / "circle.json"), {"flow.speed=-3"});
    FAIL("override accepted");
  } catch (const cornerflow::ConfigError& e) {
    CHECK(e.line() == 0);
  }
  // two circulation choices at once
  CHECK_THROWS_AS(cornerflow::validate_scenario(slurp(scenario_dir / "circle.json"), {"flow.kutta_corner=0"}),
                  cornerflow::ConfigError);
  // compressible runs are limited to circles and plates
  CHECK_THROWS_AS(cornerflow::validate_scenario(slurp(scenario_dir / "triangle_census.json"), {"gas.mach=0.3"}),
                  cornerflow::ConfigError);
}

TEST_CASE("overrides reach the normalised config") {
  const auto n = json::parse(
      cornerflow::validate_scenario(slurp(scenario_dir / "circle.json"), {"flow.circulation=1.5", "name=other"}));
  CHECK(n["flow"]["circulation"] == 1.5);
  CHECK(n["name"] == "other");
}

TEST_CASE("runs are deterministic") {
  const fs::path dir = scratch("determinism");
  const std::string cfg = "\"" + (scenario_dir / "square_census.json").string() + "\"";
  const auto a = cli("run " + cfg + " --verbosity 0 --out \"" + (dir / "a").string() + "\"", dir);
  const auto b = cli("run " + cfg + " --verbosity 0 --out \"" + (dir / "b").string() + "\"", dir);
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  CHECK(a.out.empty());
  const std::string sa = slurp(dir / "a" / "summary.json");
  CHECK_FALSE(sa.empty());
  CHECK(sa == slurp(dir / "b" / "summary.json"));
  const auto s = json::parse(sa);
  CHECK(s["status"] == "ok");
  CHECK(s["results"]["census"]["min_singular"].get<int>() >= 2);
}

TEST_CASE("circle field export") {
  const fs::path dir = scratch("field");
  const auto r = cli("run \"" + (scenario_dir / "circle.json").string() + "\" --out \"" + dir.string() + "\"", dir);
  REQUIRE(r.code == 0);
  CHECK(r.err.find("circle: ok") != std::string::npos);
  std::string header;
  const auto rows = read_csv(dir / "field.csv", header);
  CHECK(header == "x,y,psi,speed,mach,mask");
  REQUIRE(rows.size() == 200 * 200);
  std::size_t masked = 0;
  for (const auto& row : rows) {
    REQUIRE(row.size() == 6);
    const double x = row[0], y = row[1];
    const bool inside = x * x + y * y < 1.0;
    CHECK(row[5] == (inside ? 1.0 : 0.0));
    masked += inside;
    if (inside) {
      CHECK(std::isnan(row[2]));
      continue;
    }
    CHECK(std::isnan(row[4]));
    // psi of the exact circle flow with circulation 2 pi
    const double r2 = x * x + y * y;
    const double psi = y - y / r2 - std::log(std::sqrt(r2));
    CHECK(row[2] == doctest::Approx(psi).epsilon(1e-12).scale(1.0));
  }
  CHECK(masked > 0);
  const auto s = json::parse(slurp(dir / "summary.json"));
  CHECK(s["results"]["forces"]["lift"].get<double>() == doctest::Approx(-2.0 * std::numbers::pi).epsilon(1e-12));
}

TEST_CASE("aligned plate without circulation leaves the stream uniform") {
  const fs::path dir = scratch("uniform");
  write(dir / "u.json", R"({
  "schema_version": 1,
  "name": "uniform",
  "body": {"type": "flat_plate", "chord": 2.0, "alpha_deg": 0.0},
  "flow": {"speed": 1.7, "circulation": 0.0},
  "solver": {"method": "exact"},
  "output": {"field": {"file": "f.csv", "resolution": 40}}
})");
  REQUIRE(cli("run \"" + (dir / "u.json").string() + "\" --out \"" + dir.string() + "\"", dir).code == 0);
  std::string header;
  const auto rows = read_csv(dir / "f.csv", header);
  REQUIRE(rows.size() == 1600);
  for (const auto& row : rows) {
    if (row[5] != 0.0) continue;
    CHECK(std::abs(row[2] - 1.7 * row[1]) < 1e-12);
    CHECK(row[3] == doctest::Approx(1.7).epsilon(1e-12));
  }
}

TEST_CASE("compressible node export matches the summary") {
  const fs::path dir = scratch("nodes");
  const auto r = cli("run \"" + (scenario_dir / "plate0_compressible.json").string() + "\" --out \"" + dir.string() +
                         "\" --override solver.n_r=32 --override solver.n_theta=64",
                     dir);
  REQUIRE(r.code == 0);
  std::string header;
  const auto rows = read_csv(dir / "nodes.csv", header);
  CHECK(header == "r,theta,x,y,psi,rho,mach,flagged");
  CHECK(rows.size() == 32 * 64);
  double max_mach = 0.0;
  std::size_t flagged = 0;
  for (const auto& row : rows) {
    flagged += row[7] == 1.0;
    if (row[7] == 0.0) max_mach = std::max(max_mach, row[6]);
  }
  CHECK(flagged == 2);
  const auto s = json::parse(slurp(dir / "summary.json"));
  CHECK(max_mach == s["results"]["compressible"]["max_mach"].get<double>());
  CHECK(s["results"]["compressible"]["converged"] == true);
}

TEST_CASE("solver failures exit 1 with the error in the summary") {
  const fs::path dir = scratch("solver");
  write(dir / "s.json", R"({
  "schema_version": 1,
  "name": "supercritical",
  "body": {"type": "circle", "radius": 1.0},
  "gas": {"gamma": 1.4, "mach": 0.7},
  "flow": {"circulation": 0.0},
  "solver": {"n_r": 16, "n_theta": 32}
})");
  const auto r = cli("run \"" + (dir / "s.json").string() + "\" --out \"" + dir.string() + "\"", dir);
  CHECK(r.code == 1);
  const auto s = json::parse(slurp(dir / "summary.json"));
  CHECK(s["status"] == "solver_error");
  CHECK(s["error"]["kind"] == "sonic_excursion");
}

TEST_CASE("library entry point") {
  const fs::path dir = scratch("library");
  cornerflow::RunOptions opts;
  opts.out_dir = dir.string();
  opts.verbosity = 0;
  const auto r = cornerflow::run_scenario((scenario_dir / "plate30.json").string(), opts);
  CHECK(r.exit_code == 0);
  CHECK(r.summary_path == (dir / "summary.json").string());
  const auto s = json::parse(r.summary);
  const auto& corners = s["results"]["corners"];
  REQUIRE(corners.size() == 2);
  CHECK(corners[0]["singular"] == false);
  CHECK(corners[1]["singular"] == true);
}
