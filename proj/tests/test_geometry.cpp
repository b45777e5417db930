// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <vector>

#include "cornerflow/error.hpp"
#include "cornerflow/geometry.hpp"

using namespace cornerflow;

namespace {

Body unit_square() { return Body::polygon({{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}}); }

Body equilateral() {
  std::vector<Point> v;
  for (int k = 0; k < 3; ++k) v.push_back(std::polar(1.0 / std::sqrt(3.0), pi + two_pi * k / 3));
  return Body::polygon(v);
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

TEST_CASE("square corners are protruding right angles") {
  const Body b = unit_square();
  REQUIRE(b.corners().size() == 4);
  for (const auto& c : b.corners()) {
    CHECK(c.beta == doctest::Approx(1.5 * pi).epsilon(1e-14));
    CHECK(c.protruding);
  }
  CHECK(b.centroid().real() == doctest::Approx(0.0));
  CHECK(b.circumradius() == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("equilateral triangle exterior angles") {
  const Body b = equilateral();
  REQUIRE(b.corners().size() == 3);
  for (const auto& c : b.corners()) CHECK(c.beta == doctest::Approx(5.0 * pi / 3.0).epsilon(1e-14));
}

TEST_CASE("plate edges have beta 2 pi") {
  const Body b = Body::flat_plate(4.0, pi / 6);
  REQUIRE(b.corners().size() == 2);
  for (const auto& c : b.corners()) {
    CHECK(c.beta == doctest::Approx(two_pi));
    CHECK(c.protruding);
  }
  // trailing edge first, downstream and below the axis for positive incidence
  CHECK(b.corners()[0].vertex.real() > 0.0);
  CHECK(b.corners()[0].vertex.imag() < 0.0);
  CHECK(std::abs(b.corners()[0].vertex - std::polar(2.0, -pi / 6)) < 1e-14);
}

TEST_CASE("mild polygon vertices are not genuine corners") {
  std::vector<Point> v;
  for (int k = 0; k < 256; ++k) v.push_back(std::polar(1.0, two_pi * k / 256));
  for (const auto& c : Body::polygon(v).corners()) CHECK_FALSE(c.genuine());
  for (const auto& c : unit_square().corners()) CHECK(c.genuine());
  for (const auto& c : Body::flat_plate(1.0, 0.2).corners()) CHECK(c.genuine());
}

TEST_CASE("reentrant polygon corner is not protruding") {
  // L-shape: the inner corner at (1, 1) is reentrant
  const Body b = Body::polygon({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}});
  int protruding = 0;
  for (const auto& c : b.corners()) protruding += c.protruding;
  CHECK(protruding == 5);
  CHECK(b.corners()[3].beta == doctest::Approx(0.5 * pi));
}

TEST_CASE("invalid polygons") {
  CHECK(kind_of([] { Body::polygon({{0, 0}, {1, 0}}); }) == ErrorKind::invalid_geometry);
  CHECK(kind_of([] { Body::polygon({{0, 0}, {0, 1}, {1, 0}}); }) == ErrorKind::invalid_geometry);  // clockwise
  CHECK(kind_of([] { Body::polygon({{0, 0}, {1, 0}, {1, 0}, {0, 1}}); }) == ErrorKind::invalid_geometry);
  CHECK(kind_of([] { Body::polygon({{0, 0}, {2, 0}, {0, 2}, {2, 2}}); }) == ErrorKind::invalid_geometry);
  CHECK(kind_of([] { Body::polygon({{0, 0}, {1, 0}, {2, 0}, {1, 1}}); }) == ErrorKind::invalid_geometry);
}

TEST_CASE("containment and boundary distance") {
  const Body sq = unit_square();
  CHECK(sq.contains({0.1, 0.2}));
  CHECK_FALSE(sq.contains({0.6, 0.0}));
  CHECK(sq.boundary_distance({1.5, 0.0}) == doctest::Approx(1.0));
  CHECK(sq.segment_hits_boundary({-1, 0}, {1, 0}));
  CHECK_FALSE(sq.segment_hits_boundary({-1, 1}, {1, 1}));

  const Body plate = Body::flat_plate(2.0, 0.0);
  CHECK_FALSE(plate.contains({0.0, 0.0}));
  CHECK(plate.segment_hits_boundary({0.0, -1.0}, {0.0, 1.0}));
  CHECK_FALSE(plate.segment_hits_boundary({2.0, -1.0}, {2.0, 1.0}));

  const Body circle = Body::circle(2.0);
  CHECK(circle.contains({1.0, 1.0}));
  CHECK(circle.boundary_distance({3.0, 0.0}) == doctest::Approx(1.0));
}

TEST_CASE("probe rings stay in the fluid wedge") {
  const Body sq = unit_square();
  const double radii[] = {0.2, 0.1, 0.05};
  const auto rings = probe_ring(sq, 0, radii, 32);
  REQUIRE(rings.size() == 3);
  for (const auto& ring : rings) {
    for (const Point z : ring.points) {
      CHECK_FALSE(sq.contains(z));
      CHECK(std::abs(z - sq.corners()[0].vertex) == doctest::Approx(ring.radius));
    }
  }
  const double too_big[] = {1.5};
  CHECK(kind_of([&] { probe_ring(sq, 0, too_big, 32); }) == ErrorKind::geometry_clip);
}

TEST_CASE("plate edge rings avoid both faces") {
  const Body plate = Body::flat_plate(4.0, 0.3);
  const double radii[] = {0.01};
  for (std::size_t id = 0; id < 2; ++id) {
    const auto ring = probe_ring(plate, id, radii, 64).front();
    for (const Point z : ring.points) CHECK(plate.boundary_distance(z) > 0.01 * std::sin(0.05 * two_pi) * 0.99);
  }
}

TEST_CASE("contour quadrature of 1/z and z") {
  const Contour c = Contour::circle({0.3, -0.2}, 2.0, 64);
  Point i_inv{}, i_z{};
  for (std::size_t k = 0; k < c.nodes().size(); ++k) {
    i_inv += c.weights()[k] / c.nodes()[k];
    i_z += c.weights()[k] * c.nodes()[k];
  }
  CHECK(std::abs(i_inv - Point(0.0, two_pi)) < 1e-13);
  CHECK(std::abs(i_z) < 1e-13);
  CHECK(c.length() == doctest::Approx(4.0 * pi));

  const auto loop_inverse = [](const Contour& c) {
    Point j{};
    for (std::size_t k = 0; k < c.nodes().size(); ++k) j += c.weights()[k] / c.nodes()[k];
    return std::abs(j - Point(0.0, two_pi));
  };
  const std::vector<Point> square{{-2, -2}, {2, -2}, {2, 2}, {-2, 2}};
  const Contour sq = Contour::polyline(square);
  CHECK(loop_inverse(sq) < 1e-4);
  CHECK(loop_inverse(Contour::polyline(square, 24)) < 1e-12);
  CHECK(sq.coarsened().nodes().size() * 2 == sq.nodes().size());
  CHECK(c.coarsened().samples() == 32);
}

TEST_CASE("contours must clear the body") {
  const Body sq = unit_square();
  CHECK(kind_of([&] { Contour::circle({0, 0}, 0.6, 64).check_clear_of(sq); }) == ErrorKind::domain);
  Contour::circle({0, 0}, 1.0, 64).check_clear_of(sq);
  CHECK(kind_of([] { Contour::polyline({{0, 0}, {0, 1}, {1, 0}}); }) == ErrorKind::precondition);
}
