// SPDX-License-Identifier: Apache-2.0
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "cornerflow/analysis.hpp"
#include "cornerflow/error.hpp"

namespace cornerflow {

namespace {

Point integrate(const ComplexFlow& flow, const Contour& contour) {
  const auto w = flow.velocity(contour.nodes());
  Point sum{};
  for (std::size_t k = 0; k < w.size(); ++k) sum += w[k] * contour.weights()[k];
  return sum;
}

}  // namespace

LoopIntegral loop_integral(const ComplexFlow& flow, const Contour& contour) {
  if (const Body* body = flow.body()) contour.check_clear_of(*body);
  const Point fine = integrate(flow, contour);
  const Point coarse = integrate(flow, contour.coarsened());
  return {fine.real(), fine.imag(), std::abs(fine - coarse)};
}

double circulation(const ComplexFlow& flow, const Contour& contour) { return loop_integral(flow, contour).circulation; }

double mass_flux(const ComplexFlow& flow, const Contour& contour) { return loop_integral(flow, contour).mass_flux; }

LaurentFit farfield_fit(const ComplexFlow& flow, std::span<const double> radii, std::size_t samples,
                        const LaurentOptions& options) {
  if (radii.empty() || samples < 8) throw Error(ErrorKind::precondition, "far-field fit needs rings of at least 8 samples");
  Point center{};
  if (const Body* body = flow.body()) {
    center = body->centroid();
    for (double r : radii) {
      if (r < 4.0 * body->circumradius()) {
        throw Error(ErrorKind::precondition, "far-field rings must lie beyond four circumradii",
                    {{"radius", r}, {"circumradius", body->circumradius()}});
      }
    }
  }
  std::vector<Point> z;
  for (double r : radii) {
    for (std::size_t k = 0; k < samples; ++k) z.push_back(center + std::polar(r, two_pi * double(k) / double(samples)));
  }
  const auto w = flow.velocity(z);
  Eigen::MatrixXcd a(z.size(), 3);
  Eigen::VectorXcd b(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) {
    const Point inv = 1.0 / (z[k] - center);
    a(k, 0) = 1.0;
    a(k, 1) = inv;
    a(k, 2) = inv * inv;
    b(k) = w[k];
  }
  const Eigen::VectorXcd c = a.colPivHouseholderQr().solve(b);
  LaurentFit fit{c(0), c(1), c(2)};
  const Eigen::VectorXcd misfit = a * c - b;
  const double scale = std::max(std::abs(fit.c0), 1e-300);
  fit.residual = misfit.cwiseAbs().maxCoeff() / scale;
  fit.gamma_estimate = -two_pi * fit.c1.imag();
  if (fit.residual > options.max_residual) {
    throw Error(ErrorKind::far_field_contamination, "Laurent fit residual too large; use larger radii",
                {{"residual", fit.residual}, {"limit", options.max_residual}});
  }
  return fit;
}

}  // namespace cornerflow
