// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>

#include "cornerflow/error.hpp"
#include "cornerflow/forces.hpp"

using namespace cornerflow;

namespace {

// Surface pressure integral on the circle wall, p = -rho |w|^2 / 2.
Point wall_pressure_force(const ComplexFlow& flow, double R, double rho, int n) {
  Point f{};
  for (int k = 0; k < n; ++k) {
    const Point normal = std::polar(1.0, two_pi * k / n);
    const double p = -0.5 * rho * std::norm(flow.velocity(R * normal));
    f -= p * normal * (two_pi * R / n);
  }
  return f;
}

Body unit_square() { return Body::polygon({{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}}); }

}  // namespace

TEST_CASE("Kutta-Joukowsky sign convention") {
  CHECK(kutta_joukowsky_lift(1.0, {1, 0}, 1.0) == -1.0);
  CHECK(kutta_joukowsky_lift(2.0, {0, 3}, -0.5) == doctest::Approx(3.0));
}

TEST_CASE("circle force against the wall pressure integral") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double R = 0.5 + u(rng);
    const Point w_inf = std::polar(0.5 + u(rng), two_pi * u(rng));
    const double gamma = 6.0 * (u(rng) - 0.5);
    const double rho = 0.5 + u(rng);
    const auto flow = ComplexFlow::circle(R, {w_inf, gamma});
    // pressure at the exact wall: evaluate just outside it
    const Point oracle = wall_pressure_force(flow, R * (1.0 + 1e-14), rho, 256);
    const auto f = blasius_force(flow, Contour::circle({0, 0}, 2.0 * R, 256), rho);
    CHECK(std::abs(Point(f.fx, f.fy) - oracle) < 1e-10 * (1.0 + std::abs(oracle)));
    CHECK(f.lift == doctest::Approx(kutta_joukowsky_lift(rho, w_inf, gamma)).epsilon(1e-10));
    CHECK(std::abs(f.drag) < 1e-10 * (1.0 + std::abs(f.lift)));
    CHECK(f.error_estimate < 1e-10);
    CHECK(f.contour_radius == doctest::Approx(2.0 * R));
  }
}

TEST_CASE("plate lift and vanishing drag") {
  for (const double deg : {0.0, 10.0, 30.0}) {
    const double alpha = deg * pi / 180.0;
    const double gamma = -pi * 4.0 * std::sin(alpha);
    const auto flow = ComplexFlow::plate(4.0, alpha, {{1, 0}, gamma});
    const auto f = blasius_force(flow, Contour::circle({0, 0}, 4.0, 1024), 1.0);
    CHECK(f.lift == doctest::Approx(kutta_joukowsky_lift(1.0, {1, 0}, gamma)).epsilon(1e-9));
    CHECK(std::abs(f.drag) < 1e-9);
  }
}

TEST_CASE("panel square force is contour independent") {
  const Body sq = unit_square();
  const Point w_inf = std::polar(1.3, -0.2);
  const auto flow = ComplexFlow::panel(panel_solve(sq, {w_inf, 1.7}));
  const double rc = sq.circumradius();
  const auto a = blasius_force(flow, Contour::circle({0, 0}, 2.0 * rc, 1024), 1.0);
  const auto b = blasius_force(flow, Contour::circle({0, 0}, 6.0 * rc, 1024), 1.0);
  const auto c = blasius_force(flow, Contour::polyline({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}, 24), 1.0);
  const double kj = kutta_joukowsky_lift(1.0, w_inf, 1.7);
  for (const auto& f : {a, b, c}) {
    CHECK(f.lift == doctest::Approx(kj).epsilon(1e-6));
    CHECK(std::abs(f.drag) < 1e-6 * std::abs(kj));
  }
  CHECK(c.contour_radius == 0.0);
}

TEST_CASE("force contour must enclose the body") {
  const auto flow = ComplexFlow::panel(panel_solve(unit_square(), {{1, 0}, 0.0}));
  CHECK_THROWS_AS(blasius_force(flow, Contour::circle({0, 0}, 0.6, 128), 1.0), Error);
}
