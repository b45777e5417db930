// SPDX-License-Identifier: Apache-2.0
//
// Sampled property checks of the gas module, shared by the unit tests and the
// acceptance binary. Every sampled state runs every property.
#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "cornerflow/error.hpp"
#include "cornerflow/gas.hpp"

namespace cornerflow::testing {

struct GasSuiteResult {
  std::size_t states = 0;
  std::size_t failures = 0;
  double worst_bernoulli = 0.0;  // relative density error, speed round trip
  double worst_flux = 0.0;       // relative density error, flux round trip
  std::vector<std::string> messages;
};

inline constexpr double bernoulli_tolerance = 1e-12;
inline constexpr double flux_tolerance = 1e-10;

template <class F>
bool throws_kind(ErrorKind kind, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind() == kind;
  }
  return false;
}

inline GasSuiteResult gas_property_suite(double gamma, std::size_t states, std::uint64_t seed) {
  GasSuiteResult out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const GasModel gas(gamma);
  const auto fail = [&](const std::string& what) {
    ++out.failures;
    if (out.messages.size() < 8) out.messages.push_back(what);
  };

  for (std::size_t s = 0; s < states; ++s) {
    ++out.states;
    // Free-stream Mach in [0, 0.95], then a subsonic density on that Bernoulli surface.
    const double mach_inf = 0.95 * u01(rng);
    const auto state = BernoulliState::from_free_stream(gas, mach_inf);
    const double b = state.bernoulli_b();
    const double rs = state.sonic_density();
    const double r0 = state.stagnation_density();
    const double rho = rs + (r0 - rs) * (0.001 + 0.998 * u01(rng));

    // Independent oracle: speed from the Bernoulli relation written out here.
    const double enth = gamma / (gamma - 1.0) * std::pow(rho, gamma - 1.0);
    const double q = std::sqrt(std::max(0.0, 2.0 * (b - enth)));
    const double back = density_from_speed(state, gas, q);
    const double e_b = std::abs(back - rho) / rho;
    out.worst_bernoulli = std::max(out.worst_bernoulli, e_b);
    if (!(e_b <= bernoulli_tolerance)) fail("Bernoulli round trip " + std::to_string(e_b));

    const double m = 0.5 * rho * rho * q * q;
    const auto fd = density_from_flux(state, gas, m);
    const double e_f = std::abs(fd.density - rho) / rho;
    out.worst_flux = std::max(out.worst_flux, e_f);
    if (!(e_f <= flux_tolerance)) fail("flux round trip " + std::to_string(e_f));
    if (!(std::abs(fd.inverse_density * fd.density - 1.0) <= 1e-15)) fail("h is not 1/rho");

    // Monotonicity: density falls with speed and with m on the subsonic branch.
    const double q2 = q + (state.limit_speed() - q) * 0.5 * u01(rng);
    if (!(density_from_speed(state, gas, q2) <= back)) fail("density not decreasing in speed");
    const double m2 = m + (state.flux_max_m() - m) * 0.5 * u01(rng);
    if (m2 < state.flux_max_m() && !(density_from_flux(state, gas, m2).density <= fd.density * (1.0 + 1e-13))) {
      fail("density not decreasing in m");
    }
    if (!(gas.mach(q, rho) < 1.0 + 1e-12)) fail("sampled state is supersonic");

    // Sonic point: Mach 1 at the sonic density, and m_max = (rho_s c_s)^2 / 2.
    const double cs = gas.sound_speed(rs);
    if (!(std::abs(0.5 * rs * rs * cs * cs / state.flux_max_m() - 1.0) <= 1e-12)) fail("m_max mismatch");
    const double q_sonic = std::sqrt(2.0 * (b - gas.enthalpy(rs)));
    if (!(std::abs(q_sonic / cs - 1.0) <= 1e-10)) fail("sonic density not at Mach 1");

    // Error contracts.
    const double over = state.limit_speed() * (1.0 + u01(rng));
    if (!throws_kind(ErrorKind::limit_speed_exceeded, [&] { density_from_speed(state, gas, over); })) {
      fail("no limit-speed error");
    }
    if (!throws_kind(ErrorKind::limit_speed_exceeded, [&] { density_from_speed(state, gas, state.limit_speed()); })) {
      fail("no limit-speed error at the limit");
    }
    const double beyond = state.flux_max_m() * (1.0 + u01(rng));
    if (!throws_kind(ErrorKind::sonic_flux_exceeded, [&] { density_from_flux(state, gas, beyond); })) {
      fail("no sonic-flux error");
    }
    if (!throws_kind(ErrorKind::sonic_flux_exceeded, [&] { density_from_flux(state, gas, state.flux_max_m()); })) {
      fail("no sonic-flux error at m_max");
    }
  }
  return out;
}

}  // namespace cornerflow::testing
