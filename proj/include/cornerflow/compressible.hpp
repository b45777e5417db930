// SPDX-License-Identifier: Apache-2.0
//
// Subsonic compressible stream-function flow div(h(|grad psi|^2/2) grad psi) = 0
// around a circle or flat plate, discretised on a polar grid in the exterior of
// the unit circle (sigma = exp(s + i theta), s uniform) and solved by
// under-relaxed Picard iteration.
#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cornerflow/gas.hpp"
#include "cornerflow/geometry.hpp"
#include "cornerflow/incompressible.hpp"

namespace cornerflow {

class ConformalGrid {
 public:
  enum class Kind { circle, plate };

  /// r_far is the outer radius in the physical plane (|z| ~ r_far on the outer
  /// ring), at least 20 circumradii. n_theta must be even so that both plate
  /// edges are nodes. Throws unsupported for polygons.
  static ConformalGrid build(const Body& body, double r_far, std::size_t n_r, std::size_t n_theta);

  Kind kind() const noexcept { return kind_; }
  const Body& body() const noexcept { return body_; }
  std::size_t n_r() const noexcept { return n_r_; }
  std::size_t n_theta() const noexcept { return n_theta_; }
  std::size_t size() const noexcept { return n_r_ * n_theta_; }
  double ds() const noexcept { return ds_; }
  double dtheta() const noexcept { return dtheta_; }

  double s(std::size_t i) const noexcept { return ds_ * double(i); }
  double theta(std::size_t j) const noexcept { return dtheta_ * double(j); }
  Point sigma(std::size_t i, std::size_t j) const noexcept;
  Point sigma_at(double s, double theta) const noexcept;
  Point to_plane(Point sigma) const noexcept;
  /// dz / dsigma.
  Point map_derivative(Point sigma) const noexcept;
  Point z(std::size_t i, std::size_t j) const noexcept { return to_plane(sigma(i, j)); }
  /// |dz/dsigma| at a node.
  double factor(std::size_t i, std::size_t j) const noexcept { return factor_[i * n_theta_ + j]; }
  /// Metric of the (s, theta) coordinates: |sigma dz/dsigma|.
  double metric_at(double s, double theta) const noexcept;
  /// Plate-edge nodes, where the map is singular.
  bool flagged(std::size_t i, std::size_t j) const noexcept { return flagged_[i * n_theta_ + j] != 0; }
  /// Plate nodes within `radius` (sigma plane) of an edge preimage; every node of a circle grid.
  bool near_corner(std::size_t i, std::size_t j, double radius = 0.25) const noexcept;

  /// Incompressible stream function of (w_inf, Gamma) in sigma coordinates:
  /// Im(U sigma + conj(U)/sigma) - Gamma/(2 pi) ln|sigma|, zero on the body.
  double incompressible_stream(Point sigma, const FarField& far) const noexcept;

 private:
  ConformalGrid(const Body& body) : body_(body) {}

  Body body_;
  Kind kind_ = Kind::circle;
  double scale_ = 1.0;  // circle radius or plate a = chord / 4
  Point rotation_{1.0, 0.0};
  std::size_t n_r_ = 0, n_theta_ = 0;
  double ds_ = 0.0, dtheta_ = 0.0;
  std::vector<double> factor_;
  std::vector<char> flagged_;
};

struct CompressibleOptions {
  double relaxation = 0.7;
  double tolerance = 1e-10;   // relative nonlinear residual
  std::size_t max_iterations = 200;
  /// Diagnostic only: clip m below the sonic limit instead of aborting; the
  /// result is marked non-physical.
  bool capped = false;
  /// h = 1 / rho_inf throughout (linear incompressible problem on the same grid).
  bool incompressible = false;
  double corner_radius = 0.25;  // sigma-distance defining the plate corner neighbourhood
};

struct IterationRecord {
  double residual = 0.0;         // relative nonlinear residual before the update
  double linear_residual = 0.0;  // relative residual of the frozen-coefficient solve
  double max_flux_ratio = 0.0;   // max m / m_max over faces
};

struct CompressibleSolution {
  std::shared_ptr<const ConformalGrid> grid;
  FarField far;
  double rho_inf = 1.0;
  double mach_inf = 0.0;
  std::vector<double> psi, rho, mach;  // node arrays, row-major in (i, j)
  std::vector<Point> velocity;         // complex velocity w per node (NaN at flagged nodes)
  std::vector<IterationRecord> log;
  bool converged = false;
  bool non_physical = false;
  double residual = 0.0;
  double first_flux_ratio = 0.0;  // max m / m_max of the incompressible first iterate
  double max_mach = 0.0;
  std::size_t max_mach_i = 0, max_mach_j = 0;
  double corner_max_mach = 0.0;  // plate: nodes near the edges; circle: all nodes

  std::size_t index(std::size_t i, std::size_t j) const noexcept { return i * grid->n_theta() + j; }
};

/// Throws sonic_excursion (location and m / m_max in the details) as soon as
/// any face or node leaves the subsonic range, iteration_limit without
/// convergence, precondition for supersonic free streams.
CompressibleSolution solve_subsonic(const ConformalGrid& grid, const GasModel& gas, const BernoulliState& state,
                                    const FarField& far, const CompressibleOptions& options = {});

struct GridLevel {
  std::size_t n_r = 0, n_theta = 0;
};

struct StudyLevel {
  GridLevel grid;
  double spacing = 0.0;  // dtheta
  std::string status;    // "converged" or an error kind
  std::string message;
  double max_mach = 0.0;         // converged levels only
  double corner_max_mach = 0.0;  // converged levels only
  double first_flux_ratio = 0.0;  // available for every level that reached the first iterate
  std::size_t iterations = 0;
};

struct StudyResult {
  std::vector<StudyLevel> levels;
  bool corner_mach_increasing = false;  // strictly, over converged levels (needs >= 2)
  bool flux_ratio_increasing = false;   // strictly, over all levels
  bool sonic_abort_at_finest = false;
  bool corner_mach_constant = false;    // within 1e-9 relative across converged levels
  std::vector<double> cauchy_differences;  // |max_mach(k+1) - max_mach(k)|
  bool cauchy_shrinking = false;           // each difference <= half the previous
};

StudyResult refinement_study(const Body& body, const GasModel& gas, double mach_inf, double circulation,
                             const std::vector<GridLevel>& levels, double far_circumradii = 20.0,
                             const CompressibleOptions& options = {});

}  // namespace cornerflow
