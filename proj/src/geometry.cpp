// SPDX-License-Identifier: Apache-2.0
#include "cornerflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cornerflow/error.hpp"

namespace cornerflow {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_geometry: return "invalid_geometry";
    case ErrorKind::geometry_clip: return "geometry_clip";
    case ErrorKind::domain: return "domain";
    case ErrorKind::limit_speed_exceeded: return "limit_speed_exceeded";
    case ErrorKind::sonic_flux_exceeded: return "sonic_flux_exceeded";
    case ErrorKind::solver: return "solver";
    case ErrorKind::degenerate_kutta: return "degenerate_kutta";
    case ErrorKind::fit_quality: return "fit_quality";
    case ErrorKind::far_field_contamination: return "far_field_contamination";
    case ErrorKind::sonic_excursion: return "sonic_excursion";
    case ErrorKind::iteration_limit: return "iteration_limit";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

namespace {

double cross(Point a, Point b) { return a.real() * b.imag() - a.imag() * b.real(); }

double segment_distance(Point p, Point a, Point b) {
  const Point ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(p - a);
  const double t = std::clamp(((p - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
  return std::abs(p - (a + t * ab));
}

// Closed-segment intersection test, including touching and collinear overlap.
bool segments_intersect(Point p1, Point p2, Point q1, Point q2) {
  const double d1 = cross(q2 - q1, p1 - q1);
  const double d2 = cross(q2 - q1, p2 - q1);
  const double d3 = cross(p2 - p1, q1 - p1);
  const double d4 = cross(p2 - p1, q2 - p1);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  const auto on_segment = [](Point a, Point b, Point p) {
    return std::min(a.real(), b.real()) <= p.real() && p.real() <= std::max(a.real(), b.real()) &&
           std::min(a.imag(), b.imag()) <= p.imag() && p.imag() <= std::max(a.imag(), b.imag());
  };
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

double signed_area(std::span<const Point> v) {
  double a = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) a += cross(v[i], v[(i + 1) % v.size()]);
  return 0.5 * a;
}

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorKind::invalid_geometry, what); }

}  // namespace

std::vector<Corner> classify_corners(std::span<const Point> polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) invalid("polygon needs at least 3 vertices");

  double scale = 0.0;
  for (const Point& p : polygon) {
    if (!std::isfinite(p.real()) || !std::isfinite(p.imag())) invalid("non-finite polygon vertex");
    scale = std::max(scale, std::abs(p - polygon[0]));
  }
  const double eps = 1e-12 * scale;

  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(polygon[(i + 1) % n] - polygon[i]) <= eps) {
      std::ostringstream os;
      os << "repeated vertex at index " << (i + 1) % n;
      invalid(os.str());
    }
  }
  if (signed_area(polygon) <= 0.0) invalid("polygon must be counterclockwise with positive area");

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(polygon[i], polygon[(i + 1) % n], polygon[j], polygon[(j + 1) % n])) {
        std::ostringstream os;
        os << "self-intersecting polygon: edges " << i << " and " << j;
        invalid(os.str());
      }
    }
  }

  std::vector<Corner> corners;
  corners.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point v = polygon[i];
    const Point to_prev = polygon[(i + n - 1) % n] - v;
    const Point to_next = polygon[(i + 1) % n] - v;
    Corner c;
    c.vertex = v;
    c.first_side = to_prev / std::abs(to_prev);
    c.second_side = to_next / std::abs(to_next);
    // Interior angle runs counterclockwise from the next side to the previous one.
    double interior = std::arg(c.first_side / c.second_side);
    if (interior < 0.0) interior += two_pi;
    if (std::abs(interior - pi) < 1e-10 || interior < 1e-10) {
      std::ostringstream os;
      os << "degenerate corner at vertex " << i << " (collinear or spike)";
      invalid(os.str());
    }
    c.beta = two_pi - interior;
    c.protruding = c.beta > pi;
    corners.push_back(c);
  }
  return corners;
}

Body::Body(Shape shape, std::vector<Corner> corners)
    : shape_(std::move(shape)), corners_(std::move(corners)) {}

Body Body::circle(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) invalid("circle radius must be positive");
  Body b(CircleShape{radius}, {});
  b.centroid_ = 0.0;
  b.circumradius_ = radius;
  return b;
}

Body Body::flat_plate(double chord, double alpha) {
  if (!(chord > 0.0) || !std::isfinite(chord)) invalid("plate chord must be positive");
  if (!std::isfinite(alpha)) invalid("plate incidence must be finite");
  const Point along = std::polar(1.0, -alpha);
  Corner trailing;
  trailing.vertex = 0.5 * chord * along;
  trailing.beta = two_pi;
  trailing.protruding = true;
  trailing.first_side = -along;
  trailing.second_side = -along;
  Corner leading;
  leading.vertex = -0.5 * chord * along;
  leading.beta = two_pi;
  leading.protruding = true;
  leading.first_side = along;
  leading.second_side = along;
  Body b(FlatPlateShape{chord, alpha}, {trailing, leading});
  b.centroid_ = 0.0;
  b.circumradius_ = 0.5 * chord;
  return b;
}

Body Body::polygon(std::vector<Point> vertices) {
  auto corners = classify_corners(vertices);
  const double area = signed_area(vertices);
  Point c = 0.0;
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = vertices[i];
    const Point b = vertices[(i + 1) % n];
    c += (a + b) * cross(a, b);
  }
  c /= 6.0 * area;
  double r = 0.0;
  for (const Point& v : vertices) r = std::max(r, std::abs(v - c));
  Body body(PolygonShape{std::move(vertices)}, std::move(corners));
  body.centroid_ = c;
  body.circumradius_ = r;
  return body;
}

std::vector<std::pair<Point, Point>> Body::boundary_segments() const {
  std::vector<std::pair<Point, Point>> segs;
  if (const auto* plate = std::get_if<FlatPlateShape>(&shape_)) {
    segs.emplace_back(corners_[0].vertex, corners_[1].vertex);
    (void)plate;
  } else if (const auto* poly = std::get_if<PolygonShape>(&shape_)) {
    const auto& v = poly->vertices;
    for (std::size_t i = 0; i < v.size(); ++i) segs.emplace_back(v[i], v[(i + 1) % v.size()]);
  }
  return segs;
}

bool Body::contains(Point z) const {
  if (const auto* c = std::get_if<CircleShape>(&shape_)) return std::abs(z - centroid_) < c->radius;
  if (is_flat_plate()) return false;
  const auto& v = std::get<PolygonShape>(shape_).vertices;
  bool inside = false;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    const bool straddles = (v[i].imag() > z.imag()) != (v[j].imag() > z.imag());
    if (straddles) {
      const double x_cross = v[j].real() + (z.imag() - v[j].imag()) * (v[i].real() - v[j].real()) /
                                               (v[i].imag() - v[j].imag());
      if (z.real() < x_cross) inside = !inside;
    }
  }
  return inside && boundary_distance(z) > 0.0;
}

double Body::boundary_distance(Point z) const {
  if (const auto* c = std::get_if<CircleShape>(&shape_)) return std::abs(std::abs(z - centroid_) - c->radius);
  double d = std::numeric_limits<double>::infinity();
  for (const auto& [a, b] : boundary_segments()) d = std::min(d, segment_distance(z, a, b));
  return d;
}

bool Body::segment_hits_boundary(Point a, Point b) const {
  if (const auto* c = std::get_if<CircleShape>(&shape_)) {
    const double da = std::abs(a - centroid_);
    const double db = std::abs(b - centroid_);
    if ((da <= c->radius) != (db <= c->radius)) return true;
    if (da <= c->radius) return false;
    return segment_distance(centroid_, a, b) <= c->radius;
  }
  for (const auto& [p, q] : boundary_segments()) {
    if (segments_intersect(a, b, p, q)) return true;
  }
  return false;
}

double Body::adjacent_side_min_length(std::size_t corner_id) const {
  if (corner_id >= corners_.size()) throw Error(ErrorKind::domain, "corner id out of range");
  if (const auto* plate = std::get_if<FlatPlateShape>(&shape_)) return plate->chord;
  const auto& v = std::get<PolygonShape>(shape_).vertices;
  const std::size_t n = v.size();
  return std::min(std::abs(v[corner_id] - v[(corner_id + n - 1) % n]),
                  std::abs(v[(corner_id + 1) % n] - v[corner_id]));
}

std::vector<ProbeRing> probe_ring(const Body& body, std::size_t corner_id, std::span<const double> radii,
                                  std::size_t samples_per_radius, double margin_fraction) {
  if (corner_id >= body.corners().size()) throw Error(ErrorKind::domain, "corner id out of range");
  if (samples_per_radius < 2) throw Error(ErrorKind::precondition, "probe ring needs at least 2 samples");
  if (!(margin_fraction > 0.0 && margin_fraction < 0.5)) {
    throw Error(ErrorKind::precondition, "probe margin fraction must lie in (0, 0.5)");
  }
  const Corner& corner = body.corners()[corner_id];

  // Walls other than the two meeting at this corner bound the usable radius.
  double clip = body.adjacent_side_min_length(corner_id);
  if (body.is_polygon()) {
    const auto segs = body.boundary_segments();
    const std::size_t n = segs.size();
    const std::size_t before = (corner_id + n - 1) % n;
    for (std::size_t s = 0; s < n; ++s) {
      if (s == corner_id || s == before) continue;
      clip = std::min(clip, segment_distance(corner.vertex, segs[s].first, segs[s].second));
    }
  }

  const double margin = margin_fraction * corner.beta;
  std::vector<ProbeRing> rings;
  rings.reserve(radii.size());
  for (double r : radii) {
    if (!(r > 0.0)) throw Error(ErrorKind::precondition, "probe radii must be positive");
    if (r >= clip) {
      throw Error(ErrorKind::geometry_clip, "probe ring leaves the local fluid wedge",
                  {{"radius", r}, {"clip_radius", clip}, {"corner", static_cast<double>(corner_id)}});
    }
    ProbeRing ring;
    ring.radius = r;
    ring.theta.resize(samples_per_radius);
    ring.points.resize(samples_per_radius);
    for (std::size_t k = 0; k < samples_per_radius; ++k) {
      const double th = margin + (corner.beta - 2.0 * margin) * static_cast<double>(k) /
                                     static_cast<double>(samples_per_radius - 1);
      ring.theta[k] = th;
      ring.points[k] = corner.from_local(std::polar(r, th));
    }
    rings.push_back(std::move(ring));
  }
  return rings;
}

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
void gauss_legendre(std::size_t n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (std::size_t k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 1 ? t : p1;
      const double pn1 = n == 1 ? 1.0 : p0;
      dp = static_cast<double>(n) * (t * pn - pn1) / (t * t - 1.0);
      const double dt = pn / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    x[i] = -t;
    x[n - 1 - i] = t;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

}  // namespace

Contour Contour::circle(Point center, double radius, std::size_t samples) {
  if (!(radius > 0.0)) throw Error(ErrorKind::precondition, "contour radius must be positive");
  if (samples < 8) throw Error(ErrorKind::precondition, "contour needs at least 8 samples");
  Contour c;
  c.is_circle_ = true;
  c.center_ = center;
  c.radius_ = radius;
  c.samples_ = samples;
  c.length_ = two_pi * radius;
  c.nodes_.resize(samples);
  c.weights_.resize(samples);
  const double dtheta = two_pi / static_cast<double>(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    const Point e = std::polar(1.0, dtheta * static_cast<double>(k));
    c.nodes_[k] = center + radius * e;
    c.weights_[k] = Point(0.0, 1.0) * radius * e * dtheta;
  }
  return c;
}

Contour Contour::polyline(std::vector<Point> vertices, std::size_t gauss_points_per_segment) {
  if (vertices.size() < 3) throw Error(ErrorKind::precondition, "contour polyline needs 3 vertices");
  if (signed_area(vertices) <= 0.0) throw Error(ErrorKind::precondition, "contour must be counterclockwise");
  std::vector<double> gx, gw;
  gauss_legendre(gauss_points_per_segment, gx, gw);
  Contour c;
  c.gauss_ = gauss_points_per_segment;
  c.samples_ = vertices.size() * gauss_points_per_segment;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const Point a = vertices[i];
    const Point b = vertices[(i + 1) % vertices.size()];
    const Point half = 0.5 * (b - a);
    c.length_ += std::abs(b - a);
    for (std::size_t k = 0; k < gx.size(); ++k) {
      c.nodes_.push_back(0.5 * (a + b) + gx[k] * half);
      c.weights_.push_back(gw[k] * half);
    }
  }
  c.path_ = std::move(vertices);
  return c;
}

Contour Contour::coarsened() const {
  if (is_circle_) return circle(center_, radius_, std::max<std::size_t>(8, samples_ / 2));
  return polyline(path_, std::max<std::size_t>(1, gauss_ / 2));
}

void Contour::check_clear_of(const Body& body) const {
  bool hit = false;
  if (is_circle_) {
    if (const auto* circ = std::get_if<CircleShape>(&body.shape())) {
      const double d = std::abs(center_ - body.centroid());
      hit = d >= std::abs(radius_ - circ->radius) && d <= radius_ + circ->radius;
    } else {
      for (const auto& [a, b] : body.boundary_segments()) {
        const double dmin = segment_distance(center_, a, b);
        const double dmax = std::max(std::abs(a - center_), std::abs(b - center_));
        if (dmin <= radius_ && radius_ <= dmax) hit = true;
      }
    }
  } else {
    for (std::size_t i = 0; i < path_.size() && !hit; ++i) {
      hit = body.segment_hits_boundary(path_[i], path_[(i + 1) % path_.size()]);
    }
  }
  if (hit) throw Error(ErrorKind::domain, "contour touches or crosses the body");
}

}  // namespace cornerflow
