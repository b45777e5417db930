// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <random>
#include <vector>

#include "cornerflow/analysis.hpp"
#include "cornerflow/error.hpp"
#include "cornerflow/incompressible.hpp"

using namespace cornerflow;

namespace {

// Circle oracle from the polar velocity components of a doublet in a uniform
// stream plus a point vortex.
Point circle_oracle(double R, Point w_inf, double gamma, Point z) {
  const double U = std::abs(w_inf);
  const double phi = -std::arg(w_inf);  // flow direction
  const double r = std::abs(z), th = std::arg(z);
  const double ur = U * (1.0 - R * R / (r * r)) * std::cos(th - phi);
  const double ut = -U * (1.0 + R * R / (r * r)) * std::sin(th - phi) + gamma / (two_pi * r);
  const double vx = ur * std::cos(th) - ut * std::sin(th);
  const double vy = ur * std::sin(th) + ut * std::cos(th);
  return {vx, -vy};
}

// Plate oracle: invert the Joukowsky map and differentiate the circle-plane potential.
Point plate_oracle(double chord, double alpha, Point w_inf, double gamma, Point z) {
  const double a = chord / 4.0;
  const Point rot = std::polar(1.0, -alpha);
  const Point t = z / (rot * a);
  Point s = 0.5 * (t + std::sqrt(t * t - 4.0));
  if (std::abs(s) < 1.0) s = 0.5 * (t - std::sqrt(t * t - 4.0));
  const Point A = w_inf * rot * a;
  const Point dW = A - std::conj(A) / (s * s) + gamma / (Point(0, two_pi) * s);
  return dW / (rot * a * (1.0 - 1.0 / (s * s)));
}

double kutta_oracle(double chord, double alpha, Point w_inf) {
  return 4.0 * pi * (chord / 4.0) * (w_inf * std::polar(1.0, -alpha)).imag();
}

Body regular_polygon(std::size_t n, double radius) {
  std::vector<Point> v;
  for (std::size_t k = 0; k < n; ++k) v.push_back(std::polar(radius, two_pi * double(k) / double(n)));
  return Body::polygon(v);
}

Body unit_square() { return Body::polygon({{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}}); }

}  // namespace

TEST_CASE("circle formula") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const double R = 0.5 + u(rng);
    const Point w_inf = std::polar(0.2 + u(rng), two_pi * u(rng));
    const double gamma = 10.0 * (u(rng) - 0.5);
    const Point z = std::polar(R * (1.01 + 5.0 * u(rng)), two_pi * u(rng));
    const Point w = circle_flow(R, {w_inf, gamma}, z);
    CHECK(std::abs(w - circle_oracle(R, w_inf, gamma, z)) <= 1e-13 * (1.0 + std::abs(w)));
  }
  CHECK_THROWS_AS(circle_flow(1.0, {}, {0.5, 0.0}), Error);
}

TEST_CASE("circle wall is a streamline with stagnation points") {
  const auto flow = ComplexFlow::circle(1.0, {{1, 0}, 0.0});
  for (int k = 0; k < 16; ++k) {
    const Point z = std::polar(1.0, two_pi * k / 16.0);
    CHECK(std::abs(flow.stream(z)) < 1e-14);
    CHECK(std::abs((flow.velocity(z) * z).real()) < 1e-14);  // no normal velocity
  }
  CHECK(std::abs(flow.velocity({1, 0})) < 1e-15);
  CHECK(std::abs(flow.velocity({-1, 0})) < 1e-15);
}

TEST_CASE("plate formula against the Joukowsky oracle") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const double chord = 1.0 + 3.0 * u(rng);
    const double alpha = (u(rng) - 0.5) * 1.2;
    const Point w_inf = std::polar(0.5 + u(rng), 0.4 * (u(rng) - 0.5));
    const double gamma = 8.0 * (u(rng) - 0.5);
    const Point z = std::polar(chord * (0.1 + 2.0 * u(rng)), two_pi * u(rng));
    const Body body = Body::flat_plate(chord, alpha);
    if (body.boundary_distance(z) < 0.02 * chord) continue;
    const Point w = plate_flow(chord, alpha, {w_inf, gamma}, z);
    CHECK(std::abs(w - plate_oracle(chord, alpha, w_inf, gamma, z)) <= 1e-11 * (1.0 + std::abs(w)));
  }
}

TEST_CASE("plate edge coefficients vanish at the conformal Kutta roots") {
  for (const double deg : {0.0, 10.0, 20.0, 30.0}) {
    const double alpha = deg * pi / 180.0;
    const double g = kutta_oracle(4.0, alpha, {1, 0});
    CHECK(g == doctest::Approx(-pi * 4.0 * std::sin(alpha)));
    const auto te = plate_edge_coefficients(4.0, alpha, {{1, 0}, g});
    const auto le = plate_edge_coefficients(4.0, alpha, {{1, 0}, -g});
    CHECK(std::abs(te.trailing) < 1e-14);
    CHECK(std::abs(le.leading) < 1e-14);
    if (deg > 0.0) CHECK(std::abs(te.leading) > 0.1);
    // bounded velocity next to the regular trailing edge
    for (const double d : {1e-3, 1e-6, 1e-9}) {
      const Point w = plate_flow(4.0, alpha, {{1, 0}, g}, std::polar(2.0 + d, -alpha));
      CHECK(std::abs(w) < 2.0);
    }
  }
}

TEST_CASE("256-gon panel solution matches the circle") {
  const auto t0 = std::chrono::steady_clock::now();
  const Body body = regular_polygon(256, 1.0);
  PanelOptions opts;
  opts.panels_per_side = 1;
  const auto sol = panel_solve(body, {{1, 0}, 0.0}, opts);
  const auto flow = ComplexFlow::panel(sol);
  double worst = 0.0;
  int probes = 0;
  for (const double r : {1.5, 3.0, 10.0}) {
    for (int k = 0; k < 34; ++k, ++probes) {
      const Point z = std::polar(r, two_pi * (k + 0.37) / 34.0);
      const Point e = circle_oracle(1.0, {1, 0}, 0.0, z);
      worst = std::max(worst, std::abs(flow.velocity(z) - e) / std::abs(e));
    }
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(probes >= 100);
  CHECK(worst < 5e-3);
  CHECK(seconds < 5.0);
  CHECK(sol.tangency_residual < 1e-10);
  CHECK(sol.dropped_row_residual < 1e-8);
}

TEST_CASE("panel circulation constraint and affinity") {
  const Body sq = unit_square();
  const PanelSystem sys(sq, {1, 0});
  const auto s0 = sys.solve(0.0), s1 = sys.solve(1.0), sh = sys.solve(0.5);
  CHECK(s0.total_circulation() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(s1.total_circulation() == doctest::Approx(1.0).epsilon(1e-13));
  for (std::size_t k = 0; k < s0.strengths.size(); ++k) {
    CHECK(std::abs(sh.strengths[k] - 0.5 * (s0.strengths[k] + s1.strengths[k])) < 1e-12);
  }
  CHECK(s1.tangency_residual < 1e-10);
  CHECK(s1.dropped_row.has_value());
  CHECK(sys.rcond() > 1e-14);
  // loop integral of v.ds vanishes with zero circulation
  CHECK(std::abs(circulation(ComplexFlow::panel(s0), Contour::circle({0, 0}, 1.0, 512))) < 1e-8);
}

TEST_CASE("panel precondition near genuine corners") {
  PanelOptions coarse;
  coarse.panels_per_side = 4;
  CHECK_THROWS_AS(PanelSystem(unit_square(), {1, 0}, coarse), Error);
  PanelOptions few;
  few.plate_panels = 4;
  CHECK_THROWS_AS(PanelSystem(Body::flat_plate(1.0, 0.1), {1, 0}, few), Error);
  CHECK_THROWS_AS(PanelSystem(Body::circle(1.0), {1, 0}), Error);
}

TEST_CASE("plate panel solution against the exact flow") {
  const double alpha = pi / 9;
  const Body body = Body::flat_plate(4.0, alpha);
  const double g = kutta_oracle(4.0, alpha, {1, 0});
  const auto flow = ComplexFlow::panel(panel_solve(body, {{1, 0}, g}));
  double worst = 0.0;
  for (int k = 0; k < 64; ++k) {
    const Point z = std::polar(2.8, two_pi * (k + 0.5) / 64.0);
    const Point e = plate_oracle(4.0, alpha, {1, 0}, g, z);
    worst = std::max(worst, std::abs(flow.velocity(z) - e) / std::abs(e));
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("potential is an antiderivative of w and carries the circulation") {
  const double gamma = 2.5;
  const Body sq = unit_square();
  const ComplexFlow flows[] = {
      ComplexFlow::circle(1.0, {{1, 0.3}, gamma}),
      ComplexFlow::plate(2.0, 0.2, {{1, 0}, gamma}),
      ComplexFlow::panel(panel_solve(sq, {{1, 0}, gamma})),
  };
  for (const auto& flow : flows) {
    CAPTURE(flow.kind_name());
    for (const Point z : {Point(1.7, 0.4), Point(0.3, 1.6), Point(-1.8, -0.9)}) {
      const double h = 1e-3;
      const Point fd = (flow.potential(z + h) - flow.potential(z - h)) / (2.0 * h);
      CHECK(std::abs(fd - flow.velocity(z)) < 1e-6);
      CHECK(std::abs(flow.potential(z).imag() - flow.stream(z)) < 1e-10);
    }
    std::vector<Point> loop;
    for (int k = 0; k <= 400; ++k) loop.push_back(flow.branch_point() + std::polar(2.5, two_pi * k / 400.0 + 0.1));
    const auto W = flow.potential_along(loop);
    CHECK(std::abs(W.back() - W.front() - Point(gamma, 0.0)) < 1e-9);
  }
}

TEST_CASE("evaluation outside the fluid is rejected") {
  const auto circle = ComplexFlow::circle(1.0, {});
  CHECK_FALSE(circle.in_fluid({0.2, 0.1}));
  CHECK_THROWS_AS(circle.velocity(Point(0.2, 0.1)), Error);
  const auto sq = ComplexFlow::panel(panel_solve(unit_square(), {}));
  CHECK_THROWS_AS(sq.stream(Point(0.0, 0.0)), Error);
  CHECK(sq.in_fluid({1.0, 0.0}));
}

TEST_CASE("synthetic corner modes") {
  const Body sq = unit_square();
  const Corner& c = sq.corners()[0];
  const auto flow = ComplexFlow::corner_modes(c, {1.0});
  const double p = pi / c.beta;
  for (const double th : {0.3, 1.2, 4.0}) {
    const double r = 0.1;
    const Point z = c.from_local(std::polar(r, th));
    CHECK(flow.stream(z) == doctest::Approx(std::pow(r, p) * std::sin(p * th)).epsilon(1e-12));
  }
  CHECK(std::abs(flow.stream(c.vertex + c.first_side * 0.3)) < 1e-14);
}

TEST_CASE("uniform flow") {
  const auto flow = ComplexFlow::uniform({2.0, -1.0});
  CHECK(flow.stream({0.3, 0.7}) == doctest::Approx(2.0 * 0.7 - 1.0 * 0.3));
  CHECK(flow.velocity(Point(5.0, 5.0)) == Point(2.0, -1.0));
}
