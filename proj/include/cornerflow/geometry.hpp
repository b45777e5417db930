// SPDX-License-Identifier: Apache-2.0
//
// Bodies (circle, flat plate, simple polygon), corner classification, contours
// and probe rings. Points are complex numbers z = x + iy throughout.
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace cornerflow {

using Point = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// A boundary vertex seen from the fluid. The fluid wedge starts on `first_side`
/// (polar angle 0 in corner coordinates) and sweeps counterclockwise through
/// the exterior angle `beta` to `second_side`.
struct Corner {
  Point vertex;
  double beta = 0.0;
  bool protruding = false;
  Point first_side;   // unit vector along the wall at theta = 0
  Point second_side;  // unit vector along the wall at theta = beta

  /// Corner-aligned local coordinate of z, i.e. (z - vertex) / first_side.
  Point to_local(Point z) const noexcept { return (z - vertex) / first_side; }
  Point from_local(Point local) const noexcept { return vertex + local * first_side; }

  /// Turns the wall by at least pi/8; milder vertices are treated as smooth wall.
  bool genuine() const noexcept { return std::abs(beta - pi) >= pi / 8.0; }
};

struct CircleShape {
  double radius = 1.0;
};

/// Zero-thickness plate of length `chord`, centred at the origin. A positive
/// incidence `alpha` raises the upstream (left) edge: the plate runs along
/// exp(-i alpha), the trailing edge sits at (chord/2) exp(-i alpha).
struct FlatPlateShape {
  double chord = 1.0;
  double alpha = 0.0;
};

/// Counterclockwise simple polygon.
struct PolygonShape {
  std::vector<Point> vertices;
};

using Shape = std::variant<CircleShape, FlatPlateShape, PolygonShape>;

class Body {
 public:
  static Body circle(double radius);
  static Body flat_plate(double chord, double alpha);
  /// Validates simplicity and orientation; throws invalid_geometry otherwise.
  static Body polygon(std::vector<Point> vertices);

  const Shape& shape() const noexcept { return shape_; }
  const std::vector<Corner>& corners() const noexcept { return corners_; }

  bool is_circle() const noexcept { return std::holds_alternative<CircleShape>(shape_); }
  bool is_flat_plate() const noexcept { return std::holds_alternative<FlatPlateShape>(shape_); }
  bool is_polygon() const noexcept { return std::holds_alternative<PolygonShape>(shape_); }

  Point centroid() const noexcept { return centroid_; }
  /// Largest distance from the centroid to the boundary.
  double circumradius() const noexcept { return circumradius_; }

  /// Boundary as a closed list of straight segments (empty for the circle).
  /// The plate is reported as the single segment trailing -> leading edge.
  std::vector<std::pair<Point, Point>> boundary_segments() const;

  /// True when z lies strictly inside the body (never true for the plate).
  bool contains(Point z) const;
  /// Distance from z to the body boundary.
  double boundary_distance(Point z) const;
  /// True when the open segment a-b crosses or touches the body boundary.
  bool segment_hits_boundary(Point a, Point b) const;

  /// Shorter of the two walls meeting at a corner (the chord for plate edges).
  double adjacent_side_min_length(std::size_t corner_id) const;

 private:
  Body(Shape shape, std::vector<Corner> corners);

  Shape shape_;
  std::vector<Corner> corners_;
  Point centroid_{};
  double circumradius_ = 0.0;
};

/// One Corner per vertex of a simple counterclockwise polygon, beta measured on
/// the fluid side. Throws invalid_geometry for repeated, collinear-adjacent or
/// self-intersecting input.
std::vector<Corner> classify_corners(std::span<const Point> polygon);

/// Sample points on rings around a corner, restricted to the open fluid wedge
/// [margin, beta - margin]. Rings are returned radius by radius in input order.
struct ProbeRing {
  double radius = 0.0;
  std::vector<double> theta;  // corner-aligned polar angle of each sample
  std::vector<Point> points;  // absolute positions
};

inline constexpr double default_probe_margin_fraction = 0.05;

std::vector<ProbeRing> probe_ring(const Body& body, std::size_t corner_id,
                                  std::span<const double> radii, std::size_t samples_per_radius,
                                  double margin_fraction = default_probe_margin_fraction);

/// Closed, counterclockwise integration path. Circles are sampled uniformly
/// (trapezoid rule); polylines use Gauss-Legendre nodes per segment.
class Contour {
 public:
  static Contour circle(Point center, double radius, std::size_t samples);
  static Contour polyline(std::vector<Point> vertices, std::size_t gauss_points_per_segment = 8);

  /// Quadrature nodes z_k and complex weights dz_k so that sum f(z_k) dz_k
  /// approximates the contour integral of f dz.
  const std::vector<Point>& nodes() const noexcept { return nodes_; }
  const std::vector<Point>& weights() const noexcept { return weights_; }
  double length() const noexcept { return length_; }
  bool is_circle() const noexcept { return is_circle_; }
  Point center() const noexcept { return center_; }
  double radius() const noexcept { return radius_; }
  std::size_t samples() const noexcept { return samples_; }

  /// Same path with half the quadrature nodes, for error estimates.
  Contour coarsened() const;

  /// Throws domain error when the path touches or crosses the body.
  void check_clear_of(const Body& body) const;

 private:
  Contour() = default;
  std::vector<Point> nodes_;
  std::vector<Point> weights_;
  std::vector<Point> path_;  // polyline vertices (empty for circles)
  double length_ = 0.0;
  bool is_circle_ = false;
  Point center_{};
  double radius_ = 0.0;
  std::size_t samples_ = 0;
  std::size_t gauss_ = 0;
};

}  // namespace cornerflow
