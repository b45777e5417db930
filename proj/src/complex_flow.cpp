// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "cornerflow/error.hpp"
#include "cornerflow/incompressible.hpp"

namespace cornerflow {

namespace {

constexpr Point I{0.0, 1.0};

template <class... F>
struct Overload : F... {
  using F::operator()...;
};
template <class... F>
Overload(F...) -> Overload<F...>;

double wedge_angle(Point local) {
  double t = std::arg(local);
  if (t < 0.0) t += two_pi;
  return t;
}

// Complex potential of one linear-strength panel, on the sheet whose
// logarithmic cut runs from `c` along the negative real direction.
Point panel_potential(const simd::PanelArrays& p, std::size_t j, Point z, Point c) {
  const Point x0{p.x0[j], p.y0[j]};
  const Point e{p.tx[j], p.ty[j]};
  const double len = p.length[j];
  const Point zl = (z - x0) / e;
  const Point log_z = std::log(zl);
  const Point log_zl = std::log(zl - len);
  const Point i0 = zl * log_z - (zl - len) * log_zl - len;
  const Point tail = 0.5 * zl * zl * log_z - 0.25 * zl * zl - 0.5 * (zl - len) * (zl - len) * log_zl +
                     0.25 * (zl - len) * (zl - len);
  const Point i1 = zl * i0 - tail;
  const double g0 = p.g0[j];
  const double g1 = p.g1[j];
  const double strength = 0.5 * len * (g0 + g1);
  Point j_raw = strength * I * std::arg(e) + g0 * i0 + (g1 - g0) / len * i1;

  // Shift by whole turns so the integrand's branch at mid-panel matches the
  // centroid-anchored sheet.
  const Point mid = x0 + 0.5 * len * e;
  const double raw_arg = std::arg(e) + std::arg(zl - 0.5 * len);
  const double anchored_arg = std::arg(z - c) + std::arg((z - mid) / (z - c));
  const double turns = std::round((raw_arg - anchored_arg) / two_pi);
  j_raw -= two_pi * turns * strength * I;
  return j_raw / (two_pi * I);
}

}  // namespace

ComplexFlow::ComplexFlow(Rep rep, FarField far, std::optional<Body> body)
    : rep_(std::move(rep)), far_(far), body_(std::move(body)) {}

ComplexFlow ComplexFlow::uniform(Point w_inf) { return ComplexFlow(Uniform{}, {w_inf, 0.0}, std::nullopt); }

ComplexFlow ComplexFlow::circle(double radius, const FarField& far) {
  return ComplexFlow(Circle{radius}, far, Body::circle(radius));
}

ComplexFlow ComplexFlow::plate(double chord, double alpha, const FarField& far) {
  return ComplexFlow(Plate{chord, alpha}, far, Body::flat_plate(chord, alpha));
}

ComplexFlow ComplexFlow::panel(PanelSolution solution) {
  const FarField far = solution.far;
  Body body = solution.geometry->body;
  return ComplexFlow(Panel{std::make_shared<const PanelSolution>(std::move(solution))}, far, std::move(body));
}

ComplexFlow ComplexFlow::corner_modes(const Corner& corner, std::vector<double> coefficients) {
  return ComplexFlow(CornerModes{corner, std::move(coefficients)}, {{0.0, 0.0}, 0.0}, std::nullopt);
}

std::string_view ComplexFlow::kind_name() const noexcept {
  return std::visit(Overload{[](const Uniform&) { return std::string_view("uniform"); },
                             [](const Circle&) { return std::string_view("circle_exact"); },
                             [](const Plate&) { return std::string_view("plate_exact"); },
                             [](const Panel&) { return std::string_view("panel"); },
                             [](const CornerModes&) { return std::string_view("corner_modes"); }},
                    rep_);
}

const Body* ComplexFlow::body() const noexcept { return body_ ? &*body_ : nullptr; }

const PanelSolution* ComplexFlow::panel_solution() const noexcept {
  if (const auto* p = std::get_if<Panel>(&rep_)) return p->solution.get();
  return nullptr;
}

bool ComplexFlow::in_fluid(Point z) const {
  return std::visit(Overload{[](const Uniform&) { return true; },
                             [&](const Circle& c) { return std::abs(z) >= c.radius * (1.0 - 1e-12); },
                             [&](const Plate& p) {
                               const Point zeta = z * std::polar(1.0, p.alpha) / (0.25 * p.chord);
                               return !(zeta.imag() == 0.0 && std::abs(zeta.real()) < 2.0);
                             },
                             [&](const Panel&) {
                               return !body_->contains(z) && body_->boundary_distance(z) > 1e-12 * body_->circumradius();
                             },
                             [&](const CornerModes& m) {
                               const Point local = m.corner.to_local(z);
                               return std::abs(local) > 0.0 && wedge_angle(local) <= m.corner.beta;
                             }},
                    rep_);
}

void ComplexFlow::require_fluid(Point z) const {
  if (!in_fluid(z)) throw Error(ErrorKind::domain, "point outside the fluid domain", {{"x", z.real()}, {"y", z.imag()}});
}

Point ComplexFlow::velocity(Point z) const {
  const Point one[1] = {z};
  return velocity(std::span<const Point>(one))[0];
}

std::vector<Point> ComplexFlow::velocity(std::span<const Point> z) const {
  for (const Point& p : z) require_fluid(p);
  std::vector<Point> out(z.size());
  std::visit(Overload{[&](const Uniform&) { std::fill(out.begin(), out.end(), far_.w_inf); },
                      [&](const Circle& c) {
                        for (std::size_t k = 0; k < z.size(); ++k) out[k] = circle_flow(c.radius, far_, z[k]);
                      },
                      [&](const Plate& p) {
                        for (std::size_t k = 0; k < z.size(); ++k) out[k] = plate_flow(p.chord, p.alpha, far_, z[k]);
                      },
                      [&](const Panel& p) {
                        std::vector<double> x(z.size()), y(z.size()), re(z.size()), im(z.size());
                        for (std::size_t k = 0; k < z.size(); ++k) {
                          x[k] = z[k].real();
                          y[k] = z[k].imag();
                        }
                        simd::panel_kernels().velocity(p.solution->arrays, {x, y}, re, im);
                        for (std::size_t k = 0; k < z.size(); ++k) out[k] = far_.w_inf + Point{re[k], im[k]};
                      },
                      [&](const CornerModes& m) {
                        const double scale = m.corner.beta;
                        for (std::size_t k = 0; k < z.size(); ++k) {
                          const Point local = m.corner.to_local(z[k]);
                          const double r = std::abs(local);
                          const double t = wedge_angle(local);
                          Point w{};
                          for (std::size_t j = 0; j < m.coefficients.size(); ++j) {
                            const double p = double(j + 1) * pi / scale;
                            w += m.coefficients[j] * p * std::polar(std::pow(r, p - 1.0), (p - 1.0) * t);
                          }
                          out[k] = w / m.corner.first_side;
                        }
                      }},
             rep_);
  return out;
}

double ComplexFlow::stream(Point z) const {
  const Point one[1] = {z};
  return stream(std::span<const Point>(one))[0];
}

std::vector<double> ComplexFlow::stream(std::span<const Point> z) const {
  for (const Point& p : z) require_fluid(p);
  std::vector<double> out(z.size());
  if (const auto* p = std::get_if<Panel>(&rep_)) {
    std::vector<double> x(z.size()), y(z.size());
    for (std::size_t k = 0; k < z.size(); ++k) {
      x[k] = z[k].real();
      y[k] = z[k].imag();
    }
    simd::panel_kernels().stream(p->solution->arrays, {x, y}, out);
    for (std::size_t k = 0; k < z.size(); ++k) out[k] += (far_.w_inf * z[k]).imag() - p->solution->stream_offset;
    return out;
  }
  for (std::size_t k = 0; k < z.size(); ++k) out[k] = potential(z[k]).imag();
  return out;
}

Point ComplexFlow::branch_point() const noexcept {
  if (const auto* m = std::get_if<CornerModes>(&rep_)) return m->corner.vertex;
  return body_ ? body_->centroid() : Point{};
}

Point ComplexFlow::potential(Point z) const {
  require_fluid(z);
  const Point g = far_.circulation / (two_pi * I);
  return std::visit(
      Overload{[&](const Uniform&) { return far_.w_inf * z; },
               [&](const Circle& c) {
                 return far_.w_inf * z + std::conj(far_.w_inf) * c.radius * c.radius / z + g * std::log(z / c.radius);
               },
               [&](const Plate& p) {
                 const PlateMap map(p.chord, p.alpha);
                 const Point sigma = map.to_circle(z);
                 const Point u = map.scale() * far_.w_inf * map.rotation();
                 // log(sigma) re-anchored on log(z): real part ln|sigma|, cut from the centre.
                 const Point log_sigma = std::log(z) - std::log(map.scale()) + std::log(sigma * sigma / (sigma * sigma + 1.0));
                 return u * sigma + std::conj(u) / sigma + g * log_sigma;
               },
               [&](const Panel& p) {
                 const auto& a = p.solution->arrays;
                 const Point c = body_->centroid();
                 Point w = far_.w_inf * z - I * p.solution->stream_offset;
                 for (std::size_t j = 0; j < a.size(); ++j) w += panel_potential(a, j, z, c);
                 return w;
               },
               [&](const CornerModes& m) {
                 const Point local = m.corner.to_local(z);
                 const double r = std::abs(local);
                 const double t = wedge_angle(local);
                 Point w{};
                 for (std::size_t j = 0; j < m.coefficients.size(); ++j) {
                   const double p = double(j + 1) * pi / m.corner.beta;
                   w += m.coefficients[j] * std::polar(std::pow(r, p), p * t);
                 }
                 return w;
               }},
      rep_);
}

std::vector<Point> ComplexFlow::potential_along(std::span<const Point> path) const {
  std::vector<Point> out;
  out.reserve(path.size());
  const Point c = branch_point();
  double sheets = 0.0;
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (k > 0) {
      const Point a = path[k - 1] - c;
      const Point b = path[k] - c;
      if ((a.imag() >= 0.0) != (b.imag() >= 0.0)) {
        const double s = a.imag() / (a.imag() - b.imag());
        const double x = a.real() + s * (b.real() - a.real());
        if (x < 0.0) sheets += a.imag() >= 0.0 ? 1.0 : -1.0;
      }
    }
    out.push_back(potential(path[k]) + sheets * far_.circulation);
  }
  return out;
}

}  // namespace cornerflow
