// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "cornerflow/compressible.hpp"
#include "cornerflow/error.hpp"

namespace cornerflow {

ConformalGrid ConformalGrid::build(const Body& body, double r_far, std::size_t n_r, std::size_t n_theta) {
  if (body.is_polygon()) {
    throw Error(ErrorKind::unsupported, "conformal grids exist only for circles and flat plates");
  }
  if (n_r < 16 || n_theta < 16) {
    throw Error(ErrorKind::precondition, "conformal grid needs at least 16 rings and 16 angles",
                {{"n_r", double(n_r)}, {"n_theta", double(n_theta)}});
  }
  if (n_theta % 2 != 0) throw Error(ErrorKind::precondition, "n_theta must be even", {{"n_theta", double(n_theta)}});
  if (!(r_far >= 20.0 * body.circumradius() * (1.0 - 1e-12))) {
    throw Error(ErrorKind::precondition, "outer radius must be at least 20 circumradii",
                {{"r_far", r_far}, {"circumradius", body.circumradius()}});
  }

  ConformalGrid g(body);
  double sigma_far = 0.0;
  if (const auto* c = std::get_if<CircleShape>(&body.shape())) {
    g.kind_ = Kind::circle;
    g.scale_ = c->radius;
    sigma_far = r_far / c->radius;
  } else {
    const auto& p = std::get<FlatPlateShape>(body.shape());
    g.kind_ = Kind::plate;
    g.scale_ = 0.25 * p.chord;
    g.rotation_ = std::polar(1.0, -p.alpha);
    const double q = r_far / g.scale_;
    sigma_far = 0.5 * (q + std::sqrt(q * q - 4.0));
  }
  g.n_r_ = n_r;
  g.n_theta_ = n_theta;
  g.ds_ = std::log(sigma_far) / double(n_r - 1);
  g.dtheta_ = two_pi / double(n_theta);
  g.factor_.resize(n_r * n_theta);
  g.flagged_.assign(n_r * n_theta, 0);
  for (std::size_t i = 0; i < n_r; ++i) {
    for (std::size_t j = 0; j < n_theta; ++j) g.factor_[i * n_theta + j] = std::abs(g.map_derivative(g.sigma(i, j)));
  }
  if (g.kind_ == Kind::plate) {
    g.flagged_[0] = 1;
    g.flagged_[n_theta / 2] = 1;
  }
  return g;
}

Point ConformalGrid::sigma_at(double s, double theta) const noexcept { return std::polar(std::exp(s), theta); }

Point ConformalGrid::sigma(std::size_t i, std::size_t j) const noexcept { return sigma_at(s(i), theta(j)); }

Point ConformalGrid::to_plane(Point sigma) const noexcept {
  if (kind_ == Kind::circle) return scale_ * sigma;
  return rotation_ * scale_ * (sigma + 1.0 / sigma);
}

Point ConformalGrid::map_derivative(Point sigma) const noexcept {
  if (kind_ == Kind::circle) return {scale_, 0.0};
  return rotation_ * scale_ * (1.0 - 1.0 / (sigma * sigma));
}

double ConformalGrid::metric_at(double s, double theta) const noexcept {
  const Point sg = sigma_at(s, theta);
  if (kind_ == Kind::circle) return scale_ * std::exp(s);
  return scale_ * std::abs(sg - 1.0 / sg);
}

bool ConformalGrid::near_corner(std::size_t i, std::size_t j, double radius) const noexcept {
  if (kind_ == Kind::circle) return true;
  const Point sg = sigma(i, j);
  return std::abs(sg - 1.0) < radius || std::abs(sg + 1.0) < radius;
}

double ConformalGrid::incompressible_stream(Point sigma, const FarField& far) const noexcept {
  const Point u = far.w_inf * scale_ * rotation_;
  return (u * sigma + std::conj(u) / sigma).imag() - far.circulation / two_pi * std::log(std::abs(sigma));
}

}  // namespace cornerflow
