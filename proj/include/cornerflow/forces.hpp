// SPDX-License-Identifier: Apache-2.0
//
// Pressure force on a body from the Blasius contour integral, and the
// Kutta-Joukowsky lift. Drag is the component along the free-stream velocity,
// lift the component 90 degrees counterclockwise from it (up for real w_inf > 0).
#pragma once

#include "cornerflow/geometry.hpp"
#include "cornerflow/incompressible.hpp"

namespace cornerflow {

struct ForceResult {
  double drag = 0.0;
  double lift = 0.0;
  double fx = 0.0, fy = 0.0;
  double error_estimate = 0.0;  // |F(N) - F(N/2)|
  double contour_radius = 0.0;  // zero for polyline contours
  std::size_t samples = 0;
};

/// F_x - i F_y = (i rho / 2) * loop integral of w^2 dz.
ForceResult blasius_force(const ComplexFlow& flow, const Contour& contour, double rho_inf);

/// L = -rho |w_inf| Gamma: counterclockwise circulation gives downforce.
double kutta_joukowsky_lift(double rho_inf, Point w_inf, double gamma);

}  // namespace cornerflow
