// SPDX-License-Identifier: Apache-2.0
//
// cornerflow run <config.json> [--out DIR] [--verbosity N] [--override key=value]...
#include <fstream>
#include <iostream>
#include <iterator>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cornerflow/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Steady 2D potential flow around bodies with corners"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a scenario config and write summary.json");
  std::string config;
  cornerflow::RunOptions options;
  std::string out_dir;
  run->add_option("config", config, "Scenario JSON file")->required();
  run->add_option("--out", out_dir, "Output directory (overrides output.directory)");
  run->add_option("--verbosity", options.verbosity, "0 silent, 1 result line, 2 progress")
      ->check(CLI::Range(0, 2))
      ->capture_default_str();
  run->add_option("--override", options.overrides, "Set a config value, e.g. tolerances.tol_a1=1e-4");

  auto* validate = app.add_subcommand("validate", "Check a scenario config and print it with defaults filled in");
  std::string validate_config;
  std::vector<std::string> validate_overrides;
  validate->add_option("config", validate_config, "Scenario JSON file")->required();
  validate->add_option("--override", validate_overrides, "Set a config value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*run) {
    if (!out_dir.empty()) options.out_dir = out_dir;
    return cornerflow::run_scenario(config, options).exit_code;
  }

  std::ifstream f(validate_config, std::ios::binary);
  if (!f) {
    std::cerr << validate_config << ": cannot read config\n";
    return 2;
  }
  const std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  try {
    std::cout << cornerflow::validate_scenario(text, validate_overrides) << '\n';
  } catch (const cornerflow::ConfigError& e) {
    std::cerr << validate_config << ": " << e.what() << '\n';
    return 2;
  }
  return 0;
}
