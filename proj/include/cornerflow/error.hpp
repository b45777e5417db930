// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cornerflow {

/// Error taxonomy shared by all solver modules. The string form of each kind
/// is what the scenario runner writes into summary JSON.
enum class ErrorKind {
  invalid_geometry,
  geometry_clip,
  domain,
  limit_speed_exceeded,
  sonic_flux_exceeded,
  solver,
  degenerate_kutta,
  fit_quality,
  far_field_contamination,
  sonic_excursion,
  iteration_limit,
  unsupported,
  precondition,
  config,
  io,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  using Detail = std::pair<std::string, double>;

  Error(ErrorKind kind, const std::string& message, std::vector<Detail> details = {})
      : std::runtime_error(message), kind_(kind), details_(std::move(details)) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Numeric context (offending location, condition number, ...).
  const std::vector<Detail>& details() const noexcept { return details_; }

 private:
  ErrorKind kind_;
  std::vector<Detail> details_;
};

}  // namespace cornerflow
