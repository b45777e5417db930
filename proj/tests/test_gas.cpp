// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "cornerflow/error.hpp"
#include "cornerflow/gas.hpp"
#include "gas_properties.hpp"

using namespace cornerflow;

TEST_CASE("polytropic relations") {
  const GasModel gas(1.4);
  CHECK(gas.pressure(2.0) == doctest::Approx(std::pow(2.0, 1.4)));
  CHECK(gas.enthalpy(1.0) == doctest::Approx(3.5));
  CHECK(gas.enthalpy(0.0) == 0.0);
  CHECK(gas.density_from_enthalpy(gas.enthalpy(0.37)) == doctest::Approx(0.37).epsilon(1e-14));
  CHECK(gas.sound_speed(1.0) == doctest::Approx(std::sqrt(1.4)));
  // c^2 = dp/drho
  const double h = 1e-6;
  CHECK(gas.sound_speed(0.8) * gas.sound_speed(0.8) ==
        doctest::Approx((gas.pressure(0.8 + h) - gas.pressure(0.8 - h)) / (2 * h)).epsilon(1e-8));
}

TEST_CASE("free-stream normalisation") {
  const GasModel gas(1.4);
  const auto st = BernoulliState::from_free_stream(gas, 0.5);
  CHECK(st.free_stream_speed() == doctest::Approx(0.5 * std::sqrt(1.4)));
  CHECK(density_from_speed(st, gas, st.free_stream_speed()) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(density_from_flux(st, gas, 0.5 * st.free_stream_speed() * st.free_stream_speed()).density ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(st.limit_speed() == doctest::Approx(std::sqrt(2.0 * st.bernoulli_b())));
  // Stagnation and sonic density ratios for gamma = 1.4 at M = 0.5 (isentropic tables).
  CHECK(st.stagnation_density() == doctest::Approx(std::pow(1.0 + 0.2 * 0.25, 2.5)).epsilon(1e-13));
  CHECK(st.sonic_density() / st.stagnation_density() == doctest::Approx(std::pow(2.0 / 2.4, 2.5)).epsilon(1e-13));
}

TEST_CASE("stagnation flux") {
  const GasModel gas(5.0 / 3.0);
  const auto st = BernoulliState::from_free_stream(gas, 0.3);
  const auto fd = density_from_flux(st, gas, 0.0);
  CHECK(fd.density == st.stagnation_density());
  CHECK(fd.iterations == 0);
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(GasModel(1.0), Error);
  CHECK_THROWS_AS(GasModel(std::nan("")), Error);
  const GasModel gas(2.0);
  CHECK(testing::throws_kind(ErrorKind::domain, [&] { gas.pressure(-1.0); }));
  CHECK(testing::throws_kind(ErrorKind::domain, [&] { BernoulliState(gas, -1.0); }));
  const auto st = BernoulliState::from_free_stream(gas, 0.2);
  CHECK(testing::throws_kind(ErrorKind::domain, [&] { density_from_flux(st, gas, -1e-3); }));
  CHECK(testing::throws_kind(ErrorKind::domain, [&] { density_from_speed(st, gas, -1e-3); }));
}

TEST_CASE("sampled property suite") {
  for (const double gamma : {1.4, 5.0 / 3.0, 2.0}) {
    CAPTURE(gamma);
    const auto r = testing::gas_property_suite(gamma, 1000, 20261016);
    for (const auto& m : r.messages) MESSAGE(m);
    CHECK(r.states == 1000);
    CHECK(r.failures == 0);
    CHECK(r.worst_bernoulli <= testing::bernoulli_tolerance);
    CHECK(r.worst_flux <= testing::flux_tolerance);
  }
}

TEST_CASE("flux inversion near the sonic limit") {
  const GasModel gas(1.4);
  const auto st = BernoulliState::from_free_stream(gas, 0.8);
  const double m = st.flux_max_m() * (1.0 - 1e-9);
  const auto fd = density_from_flux(st, gas, m);
  CHECK(fd.density >= st.sonic_density());
  CHECK(fd.density / st.sonic_density() - 1.0 < 1e-3);
  CHECK(fd.iterations < 200);
}
