// SPDX-License-Identifier: Apache-2.0
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cornerflow/analysis.hpp"
#include "cornerflow/error.hpp"

namespace cornerflow {

std::string_view to_string(SignVerdict verdict) noexcept {
  switch (verdict) {
    case SignVerdict::both: return "both";
    case SignVerdict::positive_only: return "positive_only";
    case SignVerdict::negative_only: return "negative_only";
    case SignVerdict::indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

namespace {

std::vector<ProbeRing> free_rings(const Corner& corner, std::span<const double> radii, std::size_t samples,
                                  double margin_fraction) {
  if (samples < 2) throw Error(ErrorKind::precondition, "probe ring needs at least 2 samples");
  const double margin = margin_fraction * corner.beta;
  std::vector<ProbeRing> rings;
  for (double r : radii) {
    if (!(r > 0.0)) throw Error(ErrorKind::precondition, "probe radii must be positive", {{"radius", r}});
    ProbeRing ring{r, {}, {}};
    for (std::size_t j = 0; j < samples; ++j) {
      const double t = margin + (corner.beta - 2.0 * margin) * double(j) / double(samples - 1);
      ring.theta.push_back(t);
      ring.points.push_back(corner.from_local(std::polar(r, t)));
    }
    rings.push_back(std::move(ring));
  }
  return rings;
}

struct ModeFit {
  std::vector<double> a;  // a_1 .. a_K
  double a1_error = 0.0;
  double condition = 0.0;
  double rms = 0.0;
};

// psi ~ a_0 + sum_k a_k r^(k p) sin(k p theta). The constant absorbs any
// local offset of the discrete body streamline.
ModeFit fit_modes(const Corner& corner, std::span<const ProbeRing> rings, std::span<const double> psi,
                  std::size_t modes, double max_condition) {
  const double p = pi / corner.beta;
  const std::size_t rows = psi.size();
  const std::size_t cols = modes + 1;
  if (rows <= cols) throw Error(ErrorKind::precondition, "too few samples for the corner fit");
  Eigen::MatrixXd a(rows, cols);
  Eigen::VectorXd b(rows);
  std::size_t i = 0;
  for (const auto& ring : rings) {
    for (double t : ring.theta) {
      a(i, 0) = 1.0;
      for (std::size_t k = 1; k <= modes; ++k) a(i, k) = std::pow(ring.radius, k * p) * std::sin(k * p * t);
      b(i) = psi[i];
      ++i;
    }
  }
  Eigen::VectorXd norms = a.colwise().norm().transpose();
  for (std::size_t k = 0; k < cols; ++k) a.col(k) /= norms(k);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  ModeFit fit;
  fit.condition = s(0) / s(cols - 1);
  if (!(fit.condition <= max_condition)) {
    throw Error(ErrorKind::fit_quality, "ill-conditioned corner fit", {{"condition", fit.condition}});
  }
  const Eigen::VectorXd x = svd.solve(b);
  const double rss = (a * x - b).squaredNorm();
  fit.rms = std::sqrt(rss / double(rows));
  const double sigma2 = rss / double(rows - cols);
  const Eigen::VectorXd v1 = svd.matrixV().row(1).transpose().cwiseQuotient(s);
  fit.a1_error = std::sqrt(sigma2 * v1.squaredNorm()) / norms(1);
  for (std::size_t k = 1; k <= modes; ++k) fit.a.push_back(x(k) / norms(k));
  return fit;
}

// Plain log-log slope of the peaks; with three or more rings the first regular
// mode r^regular is fitted alongside and removed. Exponents within 0.02 of
// `regular` cannot be told apart from that mode and are skipped.
double peak_exponent(std::span<const ProbeRing> rings, std::span<const double> peaks, double regular) {
  const std::size_t n = rings.size();
  std::vector<double> lr(n), lp(n);
  for (std::size_t k = 0; k < n; ++k) {
    lr[k] = std::log(rings[k].radius);
    lp[k] = std::log(peaks[k]);
  }
  const double mx = std::accumulate(lr.begin(), lr.end(), 0.0) / double(n);
  const double my = std::accumulate(lp.begin(), lp.end(), 0.0) / double(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sxy += (lr[k] - mx) * (lp[k] - my);
    sxx += (lr[k] - mx) * (lr[k] - mx);
  }
  const double slope = sxy / sxx;
  if (n < 3) return slope;

  // Relative misfit of the best A r^e + C r^regular.
  const auto misfit = [&](double e) {
    double a11 = 0.0, a12 = 0.0, a22 = 0.0, b1 = 0.0, b2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double u = std::exp(e * lr[k]) / peaks[k];
      const double v = std::exp(regular * lr[k]) / peaks[k];
      a11 += u * u;
      a12 += u * v;
      a22 += v * v;
      b1 += u;
      b2 += v;
    }
    const double det = a11 * a22 - a12 * a12;
    if (!(std::abs(det) > 1e-12 * a11 * a22)) return std::numeric_limits<double>::infinity();
    const double ca = (b1 * a22 - b2 * a12) / det;
    const double cc = (a11 * b2 - a12 * b1) / det;
    double r = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double d = (ca * std::exp(e * lr[k]) + cc * std::exp(regular * lr[k])) / peaks[k] - 1.0;
      r += d * d;
    }
    return r;
  };
  const double lo = -1.0, hi = 2.0;
  constexpr int steps = 300;
  double best = slope, best_r = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= steps; ++k) {
    const double e = lo + (hi - lo) * double(k) / steps;
    if (std::abs(e - regular) < 0.02) continue;
    const double r = misfit(e);
    if (r < best_r) {
      best_r = r;
      best = e;
    }
  }
  if (!std::isfinite(best_r)) return slope;
  const double h = (hi - lo) / steps;
  double a = std::max(lo, best - h), b = std::min(hi, best + h);
  if (best < regular) {
    b = std::min(b, regular - 0.02);
  } else {
    a = std::max(a, regular + 0.02);
  }
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 60; ++it) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    if (misfit(c) < misfit(d)) {
      b = d;
    } else {
      a = c;
    }
  }
  return 0.5 * (a + b);
}

CornerReport fit_on_rings(const ComplexFlow& flow, const Corner& corner, std::size_t corner_id, double length_scale,
                          const std::vector<ProbeRing>& rings, const FitOptions& options) {
  if (rings.size() < 3) throw Error(ErrorKind::precondition, "corner fit needs at least 3 radii");
  double r_lo = rings.front().radius, r_hi = rings.front().radius;
  for (const auto& ring : rings) {
    r_lo = std::min(r_lo, ring.radius);
    r_hi = std::max(r_hi, ring.radius);
  }
  if (r_hi < 9.999 * r_lo) {
    throw Error(ErrorKind::precondition, "corner fit radii must span a decade", {{"r_min", r_lo}, {"r_max", r_hi}});
  }
  if (options.modes < 1) throw Error(ErrorKind::precondition, "corner fit needs at least one mode");

  std::vector<Point> points;
  for (const auto& ring : rings) points.insert(points.end(), ring.points.begin(), ring.points.end());
  const auto psi = flow.stream(points);
  const auto w = flow.velocity(points);

  CornerReport report;
  report.corner_id = corner_id;
  report.beta = corner.beta;
  report.expected_exponent = pi / corner.beta - 1.0;
  for (const auto& ring : rings) report.radii.push_back(ring.radius);

  const ModeFit full = fit_modes(corner, rings, psi, options.modes, options.max_condition);
  report.modes = full.a;
  report.a1 = full.a[0];
  report.condition = full.condition;
  report.residual = full.rms;

  // Spread against fits without the innermost / outermost ring.
  double spread = 0.0;
  if (rings.size() >= 4) {
    const std::size_t n0 = rings.front().points.size();
    const std::size_t n_last = rings.back().points.size();
    const std::span<const ProbeRing> all(rings);
    const std::span<const double> ps(psi);
    const auto tail = fit_modes(corner, all.subspan(1), ps.subspan(n0), options.modes, options.max_condition);
    const auto head = fit_modes(corner, all.first(rings.size() - 1), ps.first(psi.size() - n_last), options.modes,
                                options.max_condition);
    spread = std::max(std::abs(tail.a[0] - report.a1), std::abs(head.a[0] - report.a1));
  }
  report.a1_uncertainty = full.a1_error + spread;

  // Exponent from the largest speed on each ring: peaks P_k ~ A r^e + C r^(2p-1),
  // the second term being the first regular mode. A and C by weighted least
  // squares for each trial e, e by a scan refined with golden sections.
  std::vector<double> peaks;
  std::size_t offset = 0;
  for (const auto& ring : rings) {
    double peak = 0.0;
    for (std::size_t j = 0; j < ring.points.size(); ++j) peak = std::max(peak, std::abs(w[offset + j]));
    offset += ring.points.size();
    peaks.push_back(std::max(peak, 1e-300));
  }
  report.fitted_exponent = peak_exponent(rings, peaks, 2.0 * pi / corner.beta - 1.0);

  const double p = pi / corner.beta;
  const double a2 = report.modes.size() > 1 ? std::abs(report.modes[1]) : 0.0;
  const double scale = std::max(std::abs(flow.far_field().w_inf) * std::pow(length_scale, 1.0 - p), a2 * std::pow(length_scale, p));
  report.threshold = options.tol_a1 * scale;
  report.singular = std::abs(report.a1) > report.threshold;
  return report;
}

}  // namespace

std::vector<double> default_fit_radii(const Body& body, std::size_t corner_id) {
  const double wall = body.adjacent_side_min_length(corner_id);
  const double outer = body.is_flat_plate() ? 2.5e-3 * wall : 0.1 * wall;
  std::vector<double> radii;
  for (int k = 0; k < 5; ++k) radii.push_back(outer * std::pow(10.0, -0.25 * k));
  return radii;
}

CornerReport fit_corner(const ComplexFlow& flow, const Body& body, std::size_t corner_id,
                        std::span<const double> radii, std::size_t samples, const FitOptions& options) {
  const auto rings = probe_ring(body, corner_id, radii, samples, options.margin_fraction);
  return fit_on_rings(flow, body.corners()[corner_id], corner_id, body.circumradius(), rings, options);
}

CornerReport fit_corner(const ComplexFlow& flow, const Corner& corner, double length_scale,
                        std::span<const double> radii, std::size_t samples, const FitOptions& options) {
  const auto rings = free_rings(corner, radii, samples, options.margin_fraction);
  return fit_on_rings(flow, corner, 0, length_scale, rings, options);
}

double stream_noise_floor(const ComplexFlow& flow) {
  double scale = std::max(std::abs(flow.far_field().w_inf), 1.0);
  if (const Body* body = flow.body()) scale *= std::max(body->circumradius(), 1.0);
  double floor = 1e-12 * scale;
  if (const auto* panel = flow.panel_solution()) floor += 10.0 * panel->stream_spread;
  return floor;
}

double stream_noise_floor(const ComplexFlow& flow, Point near, double radius) {
  const auto* panel = flow.panel_solution();
  if (!panel) return stream_noise_floor(flow);
  const PanelGeometry& g = *panel->geometry;
  std::vector<double> cx, cy;
  for (const Point c : g.collocation) {
    if (std::abs(c - near) <= radius) {
      cx.push_back(c.real());
      cy.push_back(c.imag());
    }
  }
  if (cx.size() < 2) return stream_noise_floor(flow);
  std::vector<double> psi(cx.size());
  simd::panel_kernels().stream(panel->arrays, {cx, cy}, psi);
  double spread = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double v = psi[i] + (panel->far.w_inf * Point(cx[i], cy[i])).imag() - panel->stream_offset;
    spread = std::max(spread, std::abs(v));
  }
  double scale = std::max(std::abs(flow.far_field().w_inf), 1.0) * std::max(g.body.circumradius(), 1.0);
  return 1e-12 * scale + 10.0 * spread;
}

SignReport sign_attainment(const ComplexFlow& flow, const Corner& corner, double radius, std::size_t samples,
                           double margin_fraction) {
  if (samples < 64) throw Error(ErrorKind::precondition, "sign attainment needs at least 64 samples per ring");
  SignReport report;
  report.tolerance = stream_noise_floor(flow, corner.vertex, 4.0 * radius);
  const double radii[] = {radius, 0.5 * radius, 0.25 * radius};
  const auto rings = free_rings(corner, radii, samples, margin_fraction);
  int both = 0, pos = 0, neg = 0;
  for (const auto& ring : rings) {
    const auto psi = flow.stream(ring.points);
    const auto [lo, hi] = std::minmax_element(psi.begin(), psi.end());
    report.radii.push_back(ring.radius);
    report.psi_min.push_back(*lo);
    report.psi_max.push_back(*hi);
    const bool has_pos = *hi > report.tolerance;
    const bool has_neg = *lo < -report.tolerance;
    both += has_pos && has_neg;
    pos += has_pos && !has_neg;
    neg += has_neg && !has_pos;
  }
  const int n = static_cast<int>(rings.size());
  if (both == n) {
    report.verdict = SignVerdict::both;
  } else if (pos == n) {
    report.verdict = SignVerdict::positive_only;
  } else if (neg == n) {
    report.verdict = SignVerdict::negative_only;
  }
  return report;
}

}  // namespace cornerflow
