// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <limits>

#include "cornerflow/error.hpp"
#include "cornerflow/incompressible.hpp"

namespace cornerflow {

namespace {
constexpr Point I{0.0, 1.0};
}

Point circle_flow(double radius, const FarField& far, Point z) {
  if (!(radius > 0.0)) throw Error(ErrorKind::invalid_geometry, "circle radius must be positive");
  if (std::abs(z) < radius * (1.0 - 1e-12)) {
    throw Error(ErrorKind::domain, "point inside the circle", {{"x", z.real()}, {"y", z.imag()}});
  }
  const Point g = far.circulation / (two_pi * I);
  return far.w_inf - std::conj(far.w_inf) * radius * radius / (z * z) + g / z;
}

PlateMap::PlateMap(double chord, double alpha) : a_(0.25 * chord), rot_(std::polar(1.0, -alpha)) {
  if (!(chord > 0.0)) throw Error(ErrorKind::invalid_geometry, "plate chord must be positive");
}

Point PlateMap::to_circle(Point z) const {
  const Point zeta = z / (rot_ * a_);
  if (zeta.imag() == 0.0 && std::abs(zeta.real()) < 2.0) {
    throw Error(ErrorKind::domain, "point on the plate", {{"x", z.real()}, {"y", z.imag()}});
  }
  // Product of principal roots: cut exactly on the slit, sigma ~ zeta at infinity.
  return 0.5 * (zeta + std::sqrt(zeta - 2.0) * std::sqrt(zeta + 2.0));
}

PlateEdgeCoefficients plate_edge_coefficients(double chord, double alpha, const FarField& far) {
  const PlateMap map(chord, alpha);
  const Point u = map.scale() * far.w_inf * map.rotation();
  const Point d = u - std::conj(u);
  const Point g = far.circulation / (two_pi * I);
  return {d + g, d - g};
}

Point plate_flow(double chord, double alpha, const FarField& far, Point z) {
  const PlateMap map(chord, alpha);
  const Point sigma = map.to_circle(z);
  const Point u = map.scale() * far.w_inf * map.rotation();
  const auto k = plate_edge_coefficients(chord, alpha, far);
  Point w = u;
  for (const auto& [coef, pole] : {std::pair{0.5 * k.trailing, 1.0}, std::pair{-0.5 * k.leading, -1.0}}) {
    if (coef == 0.0) continue;
    const Point den = sigma - pole;
    if (den == 0.0) return {std::numeric_limits<double>::infinity(), 0.0};
    w += coef / den;
  }
  return w / (map.rotation() * map.scale());
}

}  // namespace cornerflow
