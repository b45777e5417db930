// SPDX-License-Identifier: Apache-2.0
//
// Polytropic gas p = rho^gamma, the Bernoulli relation and its two density
// inversions (from speed, and from the half-squared stream-function gradient).
#pragma once

namespace cornerflow {

class GasModel {
 public:
  /// Throws domain error unless gamma > 1.
  explicit GasModel(double gamma);

  double gamma() const noexcept { return gamma_; }

  double pressure(double rho) const;
  /// Specific enthalpy pi(rho) = gamma/(gamma-1) rho^(gamma-1), with pi(0) = 0.
  double enthalpy(double rho) const;
  /// Inverse of enthalpy() for values >= 0.
  double density_from_enthalpy(double pi_value) const;
  double sound_speed(double rho) const;
  double mach(double speed, double rho) const;

 private:
  double gamma_;
};

/// Global Bernoulli data of an irrotational flow: B = |v|^2/2 + pi(rho).
class BernoulliState {
 public:
  BernoulliState(const GasModel& gas, double bernoulli_b);

  /// Far-field normalisation rho_inf = 1 at free-stream Mach number m_inf.
  static BernoulliState from_free_stream(const GasModel& gas, double mach_inf);

  double bernoulli_b() const noexcept { return b_; }
  double limit_speed() const noexcept { return limit_speed_; }
  double stagnation_density() const noexcept { return rho_stag_; }
  double sonic_density() const noexcept { return rho_sonic_; }
  /// Largest m = |grad psi|^2 / 2 admitting a subsonic density (attained at |v| = c).
  double flux_max_m() const noexcept { return m_max_; }
  /// Free-stream speed used by from_free_stream(); zero otherwise.
  double free_stream_speed() const noexcept { return q_inf_; }

 private:
  double b_ = 0.0;
  double limit_speed_ = 0.0;
  double rho_stag_ = 0.0;
  double rho_sonic_ = 0.0;
  double m_max_ = 0.0;
  double q_inf_ = 0.0;
};

/// rho = pi^{-1}(B - q^2/2). Throws limit_speed_exceeded for q >= limit speed.
double density_from_speed(const BernoulliState& state, const GasModel& gas, double speed);

struct FluxDensity {
  double density = 0.0;
  double inverse_density = 0.0;  // h(m)
  int iterations = 0;
};

/// Subsonic root of m / rho^2 + pi(rho) = B, by safeguarded Newton on
/// [rho_sonic, rho_stagnation]. Throws sonic_flux_exceeded for m >= flux_max_m.
FluxDensity density_from_flux(const BernoulliState& state, const GasModel& gas, double m);

}  // namespace cornerflow
