// SPDX-License-Identifier: Apache-2.0
//
// Scenario runner: a JSON config names a body, gas, free stream and the
// analyses to run; the runner writes summary.json plus any requested CSV
// fields into an output directory.
//
// Config (schema_version 1), all lengths nondimensional:
//
//   name            string
//   body            {type: circle, radius}
//                   {type: flat_plate, chord, alpha_deg}
//                   {type: polygon, vertices: [[x, y], ...]}        counterclockwise
//                   {type: regular_polygon, sides, circumradius, rotation_deg}
//   gas             {incompressible: true} or {gamma, mach}
//   flow            speed (incompressible only), angle_deg, and exactly one of
//                   circulation | kutta_corner | circulation_sweep {from, to, count}
//   solver          method (exact | panel), panels_per_side, plate_panels,
//                   clustering, n_r, n_theta, far_circumradii, relaxation,
//                   tolerance, max_iterations
//   analyses        corner_fits, sign_attainment, far_field, circulation_check,
//                   forces, census, sign_census (booleans), refinement_study {levels}
//   output          directory, field {file, resolution, margin_circumradii}, nodes
//   tolerances      tol_a1, fit_modes, fit_samples, far_field_residual,
//                   coincidence_factor, sign_resolution
#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cornerflow/error.hpp"

namespace cornerflow {

/// Config violation anchored to a line of the config file (0 when the
/// offending value came from an override).
class ConfigError : public Error {
 public:
  ConfigError(std::size_t line, const std::string& message)
      : Error(ErrorKind::config, line ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct RunOptions {
  std::optional<std::string> out_dir;   // overrides output.directory
  std::vector<std::string> overrides;   // dotted.key=value, value parsed as JSON when possible
  int verbosity = 1;                    // 0 silent, 1 result line, 2 progress
  std::ostream* log = nullptr;          // defaults to std::cerr
};

struct RunResult {
  int exit_code = 0;  // 0 ok, 1 solver error, 2 config error
  std::string summary;       // summary.json text
  std::string summary_path;  // empty when the output directory was unusable
};

/// Parses and validates a config, applying overrides; throws ConfigError.
/// Returns the normalised config as JSON text with defaults filled in.
std::string validate_scenario(const std::string& config_text, const std::vector<std::string>& overrides = {});

RunResult run_scenario(const std::string& config_path, const RunOptions& options = {});

}  // namespace cornerflow
