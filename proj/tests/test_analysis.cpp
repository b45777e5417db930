// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cornerflow/analysis.hpp"
#include "cornerflow/error.hpp"

using namespace cornerflow;

namespace {

Body unit_square() { return Body::polygon({{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}}); }

// Apex pointing upstream: roots come out pairwise distinct.
Body triangle_upstream() {
  std::vector<Point> v;
  for (int k = 0; k < 3; ++k) v.push_back(std::polar(1.0 / std::sqrt(3.0), pi + two_pi * k / 3));
  return Body::polygon(v);
}

// Horizontal base: mirror symmetry pairs the two base roots.
Body triangle_base_down() {
  const double h = std::sqrt(3.0) / 6.0;
  return Body::polygon({{-0.5, -h}, {0.5, -h}, {0.0, 2.0 * h}});
}

Corner wedge(double beta, double turn) {
  Corner c;
  c.vertex = {0.3, -0.1};
  c.beta = beta;
  c.protruding = beta > pi;
  c.first_side = std::polar(1.0, turn);
  c.second_side = std::polar(1.0, turn + beta);
  return c;
}

std::vector<double> decade(double outer) {
  std::vector<double> r;
  for (int k = 0; k < 5; ++k) r.push_back(outer * std::pow(10.0, -0.25 * k));
  return r;
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::io;
}

}  // namespace

TEST_CASE("loop integrals are contour independent") {
  const auto sq = ComplexFlow::panel(panel_solve(unit_square(), {{1, 0}, 1.0}));
  const auto a = loop_integral(sq, Contour::circle({0, 0}, 2.0, 512));
  const auto b = loop_integral(sq, Contour::circle({0, 0}, 20.0, 512));
  CHECK(std::abs(a.circulation - b.circulation) < 1e-6);
  CHECK(a.circulation == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(a.error_estimate < 1e-8);

  const auto c = ComplexFlow::circle(1.0, {{0.8, 0.6}, -3.0});
  for (const double r : {1.2, 4.0, 40.0}) {
    const auto li = loop_integral(c, Contour::circle({0.1, 0.0}, r, 256));
    CHECK(li.circulation == doctest::Approx(-3.0).epsilon(1e-12));
    CHECK(std::abs(li.mass_flux) < 1e-12);
  }

  // contour need not be a circle
  const auto p = loop_integral(sq, Contour::polyline({{-1, -1}, {1.5, -1}, {1.5, 1}, {-1, 1}}, 24));
  CHECK(p.circulation == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("panel triangle carries no mass flux") {
  const auto tri = ComplexFlow::panel(panel_solve(triangle_upstream(), {{1, 0}, 0.7}));
  const Contour c = Contour::circle({0, 0}, 5.0, 512);
  CHECK(std::abs(mass_flux(tri, c)) < 1e-6 * c.length());
  CHECK(circulation(tri, c) == doctest::Approx(0.7).epsilon(1e-8));
}

TEST_CASE("far-field Laurent fit") {
  SUBCASE("exact circle") {
    const Point w_inf{0.8, -0.6};
    const auto f = farfield_fit(ComplexFlow::circle(1.0, {w_inf, 2.0}), std::vector{4.0, 5.0, 7.0}, 128);
    CHECK(std::abs(f.c0 - w_inf) < 1e-13);
    CHECK(std::abs(f.c1 - 2.0 / Point(0.0, two_pi)) < 1e-12);
    CHECK(std::abs(f.c2 + std::conj(w_inf)) < 1e-11);
    CHECK(f.gamma_estimate == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("panel square") {
    const auto sq = ComplexFlow::panel(panel_solve(unit_square(), {{1, 0}, 1.0}));
    const double rc = unit_square().circumradius();
    const auto f = farfield_fit(sq, std::vector{5.0 * rc, 6.5 * rc, 8.0 * rc}, 256);
    CHECK(f.gamma_estimate == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(std::abs(f.c1.real()) < 1e-6);
    CHECK(f.residual < 1e-2);
    CHECK(kind_of([&] { farfield_fit(sq, std::vector{5.0 * rc}, 256, {1e-12}); }) == ErrorKind::far_field_contamination);
    CHECK(kind_of([&] { farfield_fit(sq, std::vector{1.5 * rc}, 256); }) == ErrorKind::precondition);
  }
}

TEST_CASE("corner fit recovers synthetic modes") {
  for (const double beta : {1.25 * pi, 1.5 * pi, 1.75 * pi, 2.0 * pi}) {
    CAPTURE(beta);
    const Corner c = wedge(beta, 0.4);
    const auto flow = ComplexFlow::corner_modes(c, {0.7, -0.3});
    const auto r = fit_corner(flow, c, 1.0, decade(0.1), 48);
    CHECK(r.a1 == doctest::Approx(0.7).epsilon(1e-6));
    CHECK(r.modes[1] == doctest::Approx(-0.3).epsilon(1e-6));
    CHECK(r.singular);
    CHECK(r.expected_exponent == doctest::Approx(pi / beta - 1.0));
    CHECK(std::abs(r.fitted_exponent - r.expected_exponent) < 0.01);
  }
  SUBCASE("single mode, exact exponent") {
    const Corner c = wedge(1.5 * pi, 0.0);
    const auto r = fit_corner(ComplexFlow::corner_modes(c, {1.0}), c, 1.0, decade(0.2), 48);
    CHECK(r.a1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.fitted_exponent == doctest::Approx(-1.0 / 3.0).epsilon(1e-6));
  }
  SUBCASE("regular synthetic corner") {
    const Corner c = wedge(1.5 * pi, 1.0);
    const auto r = fit_corner(ComplexFlow::corner_modes(c, {0.0, 1.0}), c, 1.0, decade(0.1), 48);
    CHECK_FALSE(r.singular);
    CHECK(std::abs(r.a1) < 1e-12);
  }
}

TEST_CASE("horizontal plate without circulation is regular at both edges") {
  const Body plate = Body::flat_plate(4.0, 0.0);
  const auto flow = ComplexFlow::panel(panel_solve(plate, {{1, 0}, 0.0}));
  for (std::size_t id = 0; id < 2; ++id) {
    const auto r = fit_corner(flow, plate, id, default_fit_radii(plate, id), 48);
    CHECK_FALSE(r.singular);
    CHECK(std::abs(r.a1) < r.threshold);
    const auto s = sign_attainment(flow, plate.corners()[id], default_fit_radii(plate, id).front(), 64);
    CHECK(s.verdict == SignVerdict::both);
  }
}

TEST_CASE("Kutta roots of the inclined plate") {
  for (const double deg : {10.0, 20.0, 30.0}) {
    CAPTURE(deg);
    const double alpha = deg * pi / 180.0;
    const Body plate = Body::flat_plate(4.0, alpha);
    const PanelSystem sys(plate, {1, 0});
    const auto te = kutta_solve(sys, 0);
    const auto le = kutta_solve(sys, 1);
    const double oracle = -pi * 4.0 * std::sin(alpha);
    CHECK(std::abs(te.circulation / oracle - 1.0) < 1e-2);
    CHECK(std::abs(le.circulation / -oracle - 1.0) < 1e-2);
    CHECK(std::abs(te.circulation - le.circulation) > 10.0 * (te.uncertainty + le.uncertainty));

    const auto flow = ComplexFlow::panel(sys.solve(te.circulation));
    const auto rte = fit_corner(flow, plate, 0, default_fit_radii(plate, 0), 48);
    const auto rle = fit_corner(flow, plate, 1, default_fit_radii(plate, 1), 48);
    CHECK(std::abs(rte.a1) < rte.threshold);
    CHECK(rle.singular);
    CHECK(std::abs(rle.fitted_exponent + 0.5) < 0.05);
    const auto s = sign_attainment(flow, plate.corners()[0], default_fit_radii(plate, 0).front(), 64);
    CHECK(s.verdict == SignVerdict::both);
    CHECK(s.radii.size() == 3);
  }
  SUBCASE("zero incidence") {
    const PanelSystem sys(Body::flat_plate(4.0, 0.0), {1, 0});
    for (std::size_t id = 0; id < 2; ++id) {
      const auto r = kutta_solve(sys, id);
      CHECK(std::abs(r.circulation) <= std::max(1e-9, 3.0 * r.uncertainty));
    }
  }
}

TEST_CASE("a1 is affine in the circulation") {
  const Body tri = triangle_upstream();
  const PanelSystem sys(tri, {1, 0});
  const auto f0 = ComplexFlow::panel(sys.solve(0.0));
  const auto fh = ComplexFlow::panel(sys.solve(0.5));
  const auto f1 = ComplexFlow::panel(sys.solve(1.0));
  for (std::size_t id = 0; id < 3; ++id) {
    const auto radii = default_fit_radii(tri, id);
    const double a0 = fit_corner(f0, tri, id, radii, 48).a1;
    const double ah = fit_corner(fh, tri, id, radii, 48).a1;
    const double a1 = fit_corner(f1, tri, id, radii, 48).a1;
    CHECK(std::abs(ah - 0.5 * (a0 + a1)) < 0.01 * std::abs(a1 - a0));
  }
}

TEST_CASE("sign attainment verdicts") {
  SUBCASE("single singular mode keeps one sign on a 3 pi / 2 wedge") {
    const Corner c = wedge(1.5 * pi, 0.2);
    const auto s = sign_attainment(ComplexFlow::corner_modes(c, {1.0}), c, 0.1, 64);
    CHECK(s.verdict == SignVerdict::positive_only);
    const auto n = sign_attainment(ComplexFlow::corner_modes(c, {-1.0}), c, 0.1, 64);
    CHECK(n.verdict == SignVerdict::negative_only);
  }
  SUBCASE("first regular mode changes sign") {
    const Corner c = wedge(1.5 * pi, 0.2);
    CHECK(sign_attainment(ComplexFlow::corner_modes(c, {0.0, 1.0}), c, 0.1, 64).verdict == SignVerdict::both);
  }
  SUBCASE("field below the noise floor") {
    const Corner c = wedge(1.5 * pi, 0.2);
    CHECK(sign_attainment(ComplexFlow::corner_modes(c, {0.0}), c, 0.1, 64).verdict == SignVerdict::indeterminate);
  }
  SUBCASE("uniform flow past an aligned plate") {
    const Body plate = Body::flat_plate(2.0, 0.0);
    const auto flow = ComplexFlow::uniform({1, 0});
    for (const auto& c : plate.corners()) CHECK(sign_attainment(flow, c, 0.05, 64).verdict == SignVerdict::both);
  }
  CHECK_THROWS_AS(sign_attainment(ComplexFlow::uniform({1, 0}), wedge(pi * 1.5, 0), 0.1, 16), Error);
}

TEST_CASE("triangle census") {
  const Body tri = triangle_upstream();
  const auto c = corner_census(tri, {1, 0});
  REQUIRE(c.roots.size() == 3);
  CHECK_FALSE(c.all_regular_possible);
  CHECK(c.min_singular >= 2);
  CHECK(c.sweep_min_singular >= 2);
  CHECK(c.sweep.size() >= 33);
  CHECK_FALSE(c.degenerate_coincidence);
  CHECK(c.verdict() == "no circulation regularizes all corners");
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) {
      CHECK(std::abs(c.roots[i].circulation - c.roots[j].circulation) >
            10.0 * (c.roots[i].uncertainty + c.roots[j].uncertainty));
    }
  }
  // every root itself appears in the sweep
  for (const auto& r : c.roots) {
    const bool found = std::any_of(c.sweep.begin(), c.sweep.end(),
                                   [&](const CensusEntry& e) { return e.circulation == r.circulation; });
    CHECK(found);
  }
}

TEST_CASE("symmetric triangle pairs two roots") {
  const auto c = corner_census(triangle_base_down(), {1, 0});
  CHECK(c.degenerate_coincidence);
  CHECK(c.min_singular >= 1);
  CHECK(c.sweep_min_singular >= 1);
  CHECK_FALSE(c.all_regular_possible);
  CHECK(std::abs(c.roots[0].circulation - c.roots[1].circulation) < 1e-6);
  CHECK(std::abs(c.roots[0].circulation - c.roots[2].circulation) > 1.0);
}

TEST_CASE("square census") {
  const auto c = corner_census(unit_square(), {1, 0});
  REQUIRE(c.roots.size() == 4);
  CHECK_FALSE(c.all_regular_possible);
  CHECK(c.min_singular >= 2);
  CHECK(c.sweep_min_singular >= 2);
  CHECK(c.verdict() == "no circulation regularizes all corners");
  for (const auto& e : c.sweep) CHECK(e.singular.size() >= 2);
}

TEST_CASE("sign components") {
  const Body tri = triangle_upstream();
  const PanelSystem sys(tri, {1, 0});
  const auto root = kutta_solve(sys, 0);
  const auto flow = ComplexFlow::panel(sys.solve(root.circulation));
  const auto s = sign_component_census(flow, window_around(tri), 400);
  CHECK(s.bounded_positive == 0);
  CHECK(s.bounded_negative == 0);
  CHECK(s.components_positive >= 1);
  CHECK(s.components_negative >= 1);
  CHECK_FALSE(s.inconclusive);
  CHECK(s.masked_cells > 0);

  const auto coarse = sign_component_census(flow, window_around(tri), 8);
  CHECK(coarse.inconclusive);

  const auto circle = ComplexFlow::circle(1.0, {{1, 0}, 3.0});
  const auto sc = sign_component_census(circle, window_around(Body::circle(1.0)), 200);
  CHECK(sc.bounded_positive == 0);
  CHECK(sc.bounded_negative == 0);

  std::vector<Point> gon;
  for (int k = 0; k < 256; ++k) gon.push_back(std::polar(1.0, two_pi * k / 256));
  PanelOptions one;
  one.panels_per_side = 1;
  const Body smooth = Body::polygon(gon);
  const auto sg = sign_component_census(ComplexFlow::panel(panel_solve(smooth, {{1, 0}, 0.0}, one)), window_around(smooth), 400);
  CHECK_FALSE(sg.inconclusive);
  CHECK(sg.bounded_positive + sg.bounded_negative == 0);

  const Window w = window_around(tri, 3.0);
  CHECK(w.x_max - w.x_min == doctest::Approx(8.0 * tri.circumradius()));
}
