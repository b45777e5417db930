// SPDX-License-Identifier: Apache-2.0
#include "cornerflow/gas.hpp"

#include <cmath>

#include "cornerflow/error.hpp"

namespace cornerflow {

namespace {

void require_density(double rho) {
  if (!(rho >= 0.0)) throw Error(ErrorKind::domain, "density must be non-negative", {{"rho", rho}});
}

}  // namespace

GasModel::GasModel(double gamma) : gamma_(gamma) {
  if (!(gamma > 1.0) || !std::isfinite(gamma)) {
    throw Error(ErrorKind::domain, "isentropic coefficient must exceed 1", {{"gamma", gamma}});
  }
}

double GasModel::pressure(double rho) const {
  require_density(rho);
  return std::pow(rho, gamma_);
}

double GasModel::enthalpy(double rho) const {
  require_density(rho);
  return gamma_ / (gamma_ - 1.0) * std::pow(rho, gamma_ - 1.0);
}

double GasModel::density_from_enthalpy(double pi_value) const {
  if (!(pi_value >= 0.0)) {
    throw Error(ErrorKind::domain, "enthalpy inverse undefined for negative argument", {{"pi", pi_value}});
  }
  return std::pow((gamma_ - 1.0) / gamma_ * pi_value, 1.0 / (gamma_ - 1.0));
}

double GasModel::sound_speed(double rho) const {
  require_density(rho);
  return std::sqrt(gamma_ * std::pow(rho, gamma_ - 1.0));
}

double GasModel::mach(double speed, double rho) const {
  if (!(rho > 0.0)) throw Error(ErrorKind::domain, "Mach number needs positive density", {{"rho", rho}});
  return speed / sound_speed(rho);
}

BernoulliState::BernoulliState(const GasModel& gas, double bernoulli_b) : b_(bernoulli_b) {
  if (!(bernoulli_b > 0.0) || !std::isfinite(bernoulli_b)) {
    throw Error(ErrorKind::domain, "Bernoulli constant must be positive", {{"B", bernoulli_b}});
  }
  const double g = gas.gamma();
  limit_speed_ = std::sqrt(2.0 * b_);
  rho_stag_ = gas.density_from_enthalpy(b_);
  // |v| = c on the Bernoulli relation: B = gamma rho^(g-1) (g+1) / (2 (g-1)).
  rho_sonic_ = std::pow(2.0 * (g - 1.0) * b_ / (g * (g + 1.0)), 1.0 / (g - 1.0));
  m_max_ = 0.5 * g * std::pow(rho_sonic_, g + 1.0);
}

BernoulliState BernoulliState::from_free_stream(const GasModel& gas, double mach_inf) {
  if (!(mach_inf >= 0.0) || !std::isfinite(mach_inf)) {
    throw Error(ErrorKind::domain, "free-stream Mach number must be non-negative", {{"mach_inf", mach_inf}});
  }
  const double q_inf = mach_inf * gas.sound_speed(1.0);
  BernoulliState s(gas, 0.5 * q_inf * q_inf + gas.enthalpy(1.0));
  s.q_inf_ = q_inf;
  return s;
}

double density_from_speed(const BernoulliState& state, const GasModel& gas, double speed) {
  if (!(speed >= 0.0)) throw Error(ErrorKind::domain, "speed must be non-negative", {{"q", speed}});
  if (speed >= state.limit_speed()) {
    throw Error(ErrorKind::limit_speed_exceeded, "speed at or above the limit speed",
                {{"q", speed}, {"limit_speed", state.limit_speed()}});
  }
  return gas.density_from_enthalpy(state.bernoulli_b() - 0.5 * speed * speed);
}

FluxDensity density_from_flux(const BernoulliState& state, const GasModel& gas, double m) {
  if (!(m >= 0.0)) throw Error(ErrorKind::domain, "flux argument must be non-negative", {{"m", m}});
  if (m >= state.flux_max_m()) {
    throw Error(ErrorKind::sonic_flux_exceeded, "flux beyond the subsonic interval",
                {{"m", m}, {"flux_max_m", state.flux_max_m()}});
  }
  const double g = gas.gamma();
  const double b = state.bernoulli_b();
  const double k = g / (g - 1.0);
  if (m == 0.0) {
    const double rho = state.stagnation_density();
    return {rho, 1.0 / rho, 0};
  }

  // F is increasing on the subsonic branch: F(sonic) < 0 <= F(stagnation).
  double lo = state.sonic_density();
  double hi = state.stagnation_density();
  double rho = hi;
  int it = 0;
  for (; it < 200; ++it) {
    const double p = std::pow(rho, g - 1.0);
    const double f = m / (rho * rho) + k * p - b;
    if (f > 0.0) {
      hi = rho;
    } else if (f < 0.0) {
      lo = rho;
    } else {
      break;
    }
    const double df = -2.0 * m / (rho * rho * rho) + g * p / rho;
    double next = rho - f / df;
    if (!(df > 0.0) || !(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - rho);
    rho = next;
    if (step <= 1e-14 * rho || hi - lo <= 1e-15 * hi) break;
  }
  return {rho, 1.0 / rho, it + 1};
}

}  // namespace cornerflow
