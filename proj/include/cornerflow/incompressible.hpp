// SPDX-License-Identifier: Apache-2.0
//
// Incompressible irrotational flows around bodies: closed-form circle and
// flat-plate solutions, and a linear-strength vortex panel method for plates
// and polygons. Conventions: w = v_x - i v_y is the complex velocity, W its
// antiderivative with psi = Im W, circulation is counterclockwise-positive so
// that w ~ w_inf + Gamma / (2 pi i z) at infinity.
#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "cornerflow/geometry.hpp"
#include "cornerflow/simd/panel_kernels.hpp"

namespace cornerflow {

struct FarField {
  Point w_inf{1.0, 0.0};
  double circulation = 0.0;
};

/// w(z) for the circle |z| = radius: w_inf - conj(w_inf) R^2 / z^2 + Gamma / (2 pi i z).
Point circle_flow(double radius, const FarField& far, Point z);

/// Plate of the given chord and incidence as the Joukowsky image
/// z = exp(-i alpha) a (sigma + 1/sigma), a = chord / 4, of the unit circle.
class PlateMap {
 public:
  PlateMap(double chord, double alpha);

  double scale() const noexcept { return a_; }
  Point rotation() const noexcept { return rot_; }
  Point to_plane(Point sigma) const noexcept { return rot_ * a_ * (sigma + 1.0 / sigma); }
  /// dz/dsigma.
  Point derivative(Point sigma) const noexcept { return rot_ * a_ * (1.0 - 1.0 / (sigma * sigma)); }
  /// Exterior preimage (|sigma| >= 1). Throws domain error on the slit itself.
  Point to_circle(Point z) const;

 private:
  double a_;
  Point rot_;
};

/// Residues of the circle-plane velocity at the two plate edges. The plate is
/// regular at an edge exactly when the corresponding coefficient vanishes.
struct PlateEdgeCoefficients {
  Point trailing;  // sigma = +1
  Point leading;   // sigma = -1
};

PlateEdgeCoefficients plate_edge_coefficients(double chord, double alpha, const FarField& far);

/// w(z) around the plate. Each edge singularity is carried as a separate
/// partial fraction so that a vanishing edge coefficient cancels exactly.
Point plate_flow(double chord, double alpha, const FarField& far, Point z);

struct PanelOptions {
  /// Panels per polygon side; sides meeting a genuine corner need at least 8.
  std::size_t panels_per_side = 64;
  /// Panels along a flat plate.
  std::size_t plate_panels = 512;
  /// 0 = uniform spacing, 1 = full cosine clustering toward side ends.
  double clustering = 1.0;
};

/// Node layout and influence data shared by all circulations on one body.
struct PanelGeometry {
  Body body;
  bool closed = true;
  std::vector<Point> nodes;               // one strength unknown per node
  std::vector<std::size_t> start, end;    // node index of each panel's endpoints
  std::vector<Point> collocation;         // panel midpoints
  std::vector<Point> normals;             // unit normals (outward for polygons)
  std::vector<double> lengths;

  std::size_t panel_count() const noexcept { return start.size(); }
};

PanelGeometry build_panel_geometry(const Body& body, const PanelOptions& options);

struct PanelSolution {
  std::shared_ptr<const PanelGeometry> geometry;
  FarField far;
  std::vector<double> strengths;  // per node
  simd::PanelArrays arrays;       // packed panels carrying `strengths`

  double stream_offset = 0.0;        // psi on the body, subtracted on evaluation
  double stream_spread = 0.0;        // max |psi - offset| over collocation points
  double tangency_residual = 0.0;    // max |v.n| / |w_inf| over enforced rows
  std::optional<std::size_t> dropped_row;
  double dropped_row_residual = 0.0;  // |v.n| / |w_inf| at the dropped row
  double rcond = 0.0;                 // reciprocal condition estimate of the system

  double total_circulation() const;
};

/// Factorised panel system for one body and free stream. Solutions depend
/// affinely on the circulation: solve(t) = (1 - t) solve(0) + t solve(1).
class PanelSystem {
 public:
  PanelSystem(const Body& body, Point w_inf, const PanelOptions& options = {});

  PanelSolution solve(double circulation) const;
  const PanelGeometry& geometry() const noexcept { return *geometry_; }
  Point w_inf() const noexcept { return w_inf_; }
  double rcond() const noexcept { return rcond_; }

 private:
  std::shared_ptr<const PanelGeometry> geometry_;
  Point w_inf_;
  std::vector<double> free_part_;     // strengths for (w_inf, Gamma = 0)
  std::vector<double> unit_part_;     // strengths per unit circulation with w_inf = 0
  std::vector<double> normal_matrix_;  // every tangency row, row-major, for residuals
  std::vector<double> normal_rhs_;
  std::optional<std::size_t> dropped_;
  double rcond_ = 0.0;
};

PanelSolution panel_solve(const Body& body, const FarField& far, const PanelOptions& options = {});

/// Any incompressible flow the analysis tools can probe.
class ComplexFlow {
 public:
  static ComplexFlow uniform(Point w_inf);
  static ComplexFlow circle(double radius, const FarField& far);
  static ComplexFlow plate(double chord, double alpha, const FarField& far);
  static ComplexFlow panel(PanelSolution solution);
  /// Local synthetic field W = sum_k a_k zeta^(k pi / beta), zeta = corner.to_local(z).
  static ComplexFlow corner_modes(const Corner& corner, std::vector<double> coefficients);

  std::string_view kind_name() const noexcept;
  const Body* body() const noexcept;
  FarField far_field() const noexcept { return far_; }

  /// Throws domain error for points inside the body, on a plate slit, or
  /// (synthetic fields) outside the wedge.
  Point velocity(Point z) const;
  std::vector<Point> velocity(std::span<const Point> z) const;
  double stream(Point z) const;
  std::vector<double> stream(std::span<const Point> z) const;

  /// Complex potential on its principal sheet: the logarithmic branch cut runs
  /// from branch_point() along the negative real direction. Panel flows assume
  /// the body is star-shaped about its centroid; their potentials carry
  /// roundoff of roughly 1e-13 |W| per panel.
  Point potential(Point z) const;
  Point branch_point() const noexcept;
  /// Potential continued along a path, adding Gamma each time the path crosses
  /// the cut counterclockwise. For a closed loop back - front = loop integral of w dz.
  std::vector<Point> potential_along(std::span<const Point> path) const;

  bool in_fluid(Point z) const;

  const PanelSolution* panel_solution() const noexcept;

 private:
  struct Uniform {};
  struct Circle {
    double radius;
  };
  struct Plate {
    double chord, alpha;
  };
  struct Panel {
    std::shared_ptr<const PanelSolution> solution;
  };
  struct CornerModes {
    Corner corner;
    std::vector<double> coefficients;
  };
  using Rep = std::variant<Uniform, Circle, Plate, Panel, CornerModes>;

  ComplexFlow(Rep rep, FarField far, std::optional<Body> body);
  void require_fluid(Point z) const;

  Rep rep_;
  FarField far_;
  std::optional<Body> body_;
};

}  // namespace cornerflow
