// SPDX-License-Identifier: Apache-2.0
//
// Closed-form single-panel integrals, shared by the scalar kernel and the
// influence-matrix assembly. In panel coordinates Z = xi + i eta (panel along
// [0, L]) with Lambda = Log(Z / (Z - L)):
//
//   int_0^L ds / (Z - s)        = Lambda
//   int_0^L s ds / (Z - s)      = Z Lambda - L
//   Re int_0^L log(Z - s) ds    = Re(Z Lambda) + L ln|Z - L| - L
//   Re int_0^L s log(Z - s) ds  = Re(Z^2 Lambda) / 2 + (L^2 / 2) ln|Z - L| - L xi / 2 - L^2 / 4
//
// The principal branch of Lambda is cut exactly along the panel.
#pragma once

#include <cmath>
#include <numbers>

namespace cornerflow::simd::detail {

inline constexpr double inv_two_pi = 0.5 / std::numbers::pi;

struct PanelFrame {
  double xi, eta;
  double log_ratio;  // Re Lambda
  double angle;      // Im Lambda
};

inline PanelFrame panel_frame(double x, double y, double x0, double y0, double tx, double ty, double len) {
  const double dx = x - x0;
  const double dy = y - y0;
  PanelFrame f;
  f.xi = dx * tx + dy * ty;
  f.eta = -dx * ty + dy * tx;
  const double xl = f.xi - len;
  const double r0 = f.xi * f.xi + f.eta * f.eta;
  const double r1 = xl * xl + f.eta * f.eta;
  f.log_ratio = 0.5 * std::log(r0 / r1);
  f.angle = std::atan2(-f.eta * len, f.xi * xl + f.eta * f.eta);
  return f;
}

/// Complex velocity (re, im of w) of a unit-strength "start" and "end" hat on
/// one panel, so w = g0 * start + g1 * end.
struct HatVelocity {
  double start_re, start_im, end_re, end_im;
};

inline HatVelocity hat_velocity(const PanelFrame& f, double tx, double ty, double len) {
  // C_end = (Z Lambda - L) / L, C_start = Lambda - C_end; w = -i C conj(e) / (2 pi).
  const double m_re = (f.xi * f.log_ratio - f.eta * f.angle - len) / len;
  const double m_im = (f.xi * f.angle + f.eta * f.log_ratio) / len;
  const double s_re = f.log_ratio - m_re;
  const double s_im = f.angle - m_im;
  HatVelocity h;
  h.start_re = (s_im * tx - s_re * ty) * inv_two_pi;
  h.start_im = -(s_re * tx + s_im * ty) * inv_two_pi;
  h.end_re = (m_im * tx - m_re * ty) * inv_two_pi;
  h.end_im = -(m_re * tx + m_im * ty) * inv_two_pi;
  return h;
}

/// Stream function of unit start / end hats: psi = g0 * start + g1 * end.
struct HatStream {
  double start, end;
};

inline HatStream hat_stream(const PanelFrame& f, double len, double log_r1) {
  const double re_z_lambda = f.xi * f.log_ratio - f.eta * f.angle;
  const double re_z2_lambda = (f.xi * f.xi - f.eta * f.eta) * f.log_ratio - 2.0 * f.xi * f.eta * f.angle;
  const double i0 = re_z_lambda + len * log_r1 - len;
  const double i1 = 0.5 * re_z2_lambda + 0.5 * len * len * log_r1 - 0.5 * len * f.xi - 0.25 * len * len;
  const double end = i1 / len;
  return {-(i0 - end) * inv_two_pi, -end * inv_two_pi};
}

inline double log_distance_to_end(const PanelFrame& f, double len) {
  const double xl = f.xi - len;
  return 0.5 * std::log(xl * xl + f.eta * f.eta);
}

}  // namespace cornerflow::simd::detail
