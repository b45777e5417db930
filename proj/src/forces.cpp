// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "cornerflow/error.hpp"
#include "cornerflow/forces.hpp"

namespace cornerflow {

namespace {

Point blasius(const ComplexFlow& flow, const Contour& contour, double rho) {
  const auto w = flow.velocity(contour.nodes());
  Point sum{};
  for (std::size_t k = 0; k < w.size(); ++k) sum += w[k] * w[k] * contour.weights()[k];
  return Point{0.0, 0.5 * rho} * sum;
}

}  // namespace

ForceResult blasius_force(const ComplexFlow& flow, const Contour& contour, double rho_inf) {
  if (const Body* body = flow.body()) contour.check_clear_of(*body);
  const Point f = blasius(flow, contour, rho_inf);
  const Point coarse = blasius(flow, contour.coarsened(), rho_inf);

  ForceResult r;
  r.fx = f.real();
  r.fy = -f.imag();
  r.error_estimate = std::abs(f - coarse);
  r.samples = contour.samples();
  r.contour_radius = contour.is_circle() ? contour.radius() : 0.0;
  const Point w_inf = flow.far_field().w_inf;
  const Point force{r.fx, r.fy};
  const Point u = std::abs(w_inf) > 0.0 ? std::conj(w_inf) / std::abs(w_inf) : Point{1.0, 0.0};
  const Point along = force * std::conj(u);
  r.drag = along.real();
  r.lift = along.imag();
  return r;
}

double kutta_joukowsky_lift(double rho_inf, Point w_inf, double gamma) { return -rho_inf * std::abs(w_inf) * gamma; }

}  // namespace cornerflow
