// SPDX-License-Identifier: Apache-2.0
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "cornerflow/error.hpp"
#include "cornerflow/incompressible.hpp"
#include "simd/panel_math.hpp"

namespace cornerflow {

namespace {

constexpr std::size_t min_panels_near_corner = 8;

// Side parameter of node k out of n, blending uniform and cosine spacing.
double side_parameter(std::size_t k, std::size_t n, double clustering) {
  const double u = static_cast<double>(k) / static_cast<double>(n);
  return (1.0 - clustering) * u + clustering * 0.5 * (1.0 - std::cos(pi * u));
}

void add_panel(PanelGeometry& g, std::size_t a, std::size_t b) {
  const Point p = g.nodes[a];
  const Point q = g.nodes[b];
  const double len = std::abs(q - p);
  if (!(len > 0.0)) throw Error(ErrorKind::solver, "duplicate panel nodes");
  const Point e = (q - p) / len;
  g.start.push_back(a);
  g.end.push_back(b);
  g.lengths.push_back(len);
  g.collocation.push_back(0.5 * (p + q));
  g.normals.push_back(Point{0.0, -1.0} * e);
}

}  // namespace

PanelGeometry build_panel_geometry(const Body& body, const PanelOptions& options) {
  if (options.clustering < 0.0 || options.clustering > 1.0) {
    throw Error(ErrorKind::precondition, "panel clustering must lie in [0, 1]", {{"clustering", options.clustering}});
  }
  PanelGeometry g{body, true, {}, {}, {}, {}, {}, {}};
  if (const auto* plate = std::get_if<FlatPlateShape>(&body.shape())) {
    const std::size_t n = options.plate_panels;
    if (n < min_panels_near_corner) {
      throw Error(ErrorKind::precondition, "too few plate panels", {{"panels", double(n)}});
    }
    g.closed = false;
    const Point te = body.corners()[0].vertex;
    const Point le = body.corners()[1].vertex;
    (void)plate;
    for (std::size_t k = 0; k <= n; ++k) g.nodes.push_back(te + (le - te) * side_parameter(k, n, options.clustering));
    for (std::size_t k = 0; k < n; ++k) add_panel(g, k, k + 1);
    return g;
  }
  const auto* poly = std::get_if<PolygonShape>(&body.shape());
  if (!poly) throw Error(ErrorKind::unsupported, "panel method needs a polygon or a flat plate");

  const auto& v = poly->vertices;
  const auto& corners = body.corners();
  const std::size_t nv = v.size();
  const std::size_t per_side = options.panels_per_side;
  if (per_side == 0) throw Error(ErrorKind::precondition, "panels_per_side must be positive");
  for (std::size_t i = 0; i < nv; ++i) {
    const bool genuine = corners[i].genuine() || corners[(i + 1) % nv].genuine();
    if (genuine && per_side < min_panels_near_corner) {
      throw Error(ErrorKind::precondition, "sides meeting a corner need at least 8 panels",
                  {{"side", double(i)}, {"panels", double(per_side)}});
    }
  }
  for (std::size_t i = 0; i < nv; ++i) {
    const Point a = v[i];
    const Point b = v[(i + 1) % nv];
    for (std::size_t k = 0; k < per_side; ++k) g.nodes.push_back(a + (b - a) * side_parameter(k, per_side, options.clustering));
  }
  const std::size_t n = g.nodes.size();
  for (std::size_t k = 0; k < n; ++k) add_panel(g, k, (k + 1) % n);
  return g;
}

double PanelSolution::total_circulation() const {
  double total = 0.0;
  for (std::size_t p = 0; p < arrays.size(); ++p) total += 0.5 * arrays.length[p] * (arrays.g0[p] + arrays.g1[p]);
  return total;
}

PanelSystem::PanelSystem(const Body& body, Point w_inf, const PanelOptions& options)
    : geometry_(std::make_shared<PanelGeometry>(build_panel_geometry(body, options))), w_inf_(w_inf) {
  const PanelGeometry& g = *geometry_;
  const std::size_t np = g.panel_count();
  const std::size_t nn = g.nodes.size();

  // Normal velocity at every collocation point per unit node strength.
  normal_matrix_.assign(np * nn, 0.0);
  normal_rhs_.resize(np);
  for (std::size_t i = 0; i < np; ++i) {
    const Point c = g.collocation[i];
    const Point nrm = g.normals[i];
    double* row = normal_matrix_.data() + i * nn;
    for (std::size_t p = 0; p < np; ++p) {
      const Point x0 = g.nodes[g.start[p]];
      const Point t = (g.nodes[g.end[p]] - x0) / g.lengths[p];
      const auto f = simd::detail::panel_frame(c.real(), c.imag(), x0.real(), x0.imag(), t.real(), t.imag(), g.lengths[p]);
      const auto h = simd::detail::hat_velocity(f, t.real(), t.imag(), g.lengths[p]);
      row[g.start[p]] += (Point{h.start_re, h.start_im} * nrm).real();
      row[g.end[p]] += (Point{h.end_re, h.end_im} * nrm).real();
    }
    normal_rhs_[i] = -(w_inf * nrm).real();
  }

  // Closed bodies have one unknown per panel: the circulation row replaces
  // the tangency row of the longest panel.
  if (g.closed) {
    dropped_ = static_cast<std::size_t>(std::max_element(g.lengths.begin(), g.lengths.end()) - g.lengths.begin());
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nn, nn);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nn, 2);
  std::size_t r = 0;
  for (std::size_t i = 0; i < np; ++i) {
    if (dropped_ && *dropped_ == i) continue;
    for (std::size_t j = 0; j < nn; ++j) a(r, j) = normal_matrix_[i * nn + j];
    rhs(r, 0) = normal_rhs_[i];
    ++r;
  }
  for (std::size_t p = 0; p < np; ++p) {
    a(r, g.start[p]) += 0.5 * g.lengths[p];
    a(r, g.end[p]) += 0.5 * g.lengths[p];
  }
  rhs(r, 1) = 1.0;
  if (r + 1 != nn) throw Error(ErrorKind::solver, "panel system is not square");

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  rcond_ = lu.rcond();
  if (!(rcond_ > 1e-14)) {
    throw Error(ErrorKind::solver, "singular panel influence matrix", {{"rcond", rcond_}, {"unknowns", double(nn)}});
  }
  const Eigen::MatrixXd x = lu.solve(rhs);
  free_part_.resize(nn);
  unit_part_.resize(nn);
  for (std::size_t j = 0; j < nn; ++j) {
    free_part_[j] = x(j, 0);
    unit_part_[j] = x(j, 1);
  }
}

PanelSolution PanelSystem::solve(double circulation) const {
  const PanelGeometry& g = *geometry_;
  const std::size_t np = g.panel_count();
  const std::size_t nn = g.nodes.size();

  PanelSolution s;
  s.geometry = geometry_;
  s.far = {w_inf_, circulation};
  s.rcond = rcond_;
  s.dropped_row = dropped_;
  s.strengths.resize(nn);
  for (std::size_t j = 0; j < nn; ++j) s.strengths[j] = free_part_[j] + circulation * unit_part_[j];

  auto& p = s.arrays;
  p.resize(np);
  for (std::size_t k = 0; k < np; ++k) {
    const Point x0 = g.nodes[g.start[k]];
    const Point t = (g.nodes[g.end[k]] - x0) / g.lengths[k];
    p.x0[k] = x0.real();
    p.y0[k] = x0.imag();
    p.tx[k] = t.real();
    p.ty[k] = t.imag();
    p.length[k] = g.lengths[k];
    p.g0[k] = s.strengths[g.start[k]];
    p.g1[k] = s.strengths[g.end[k]];
  }

  const double scale = std::abs(w_inf_) > 0.0 ? std::abs(w_inf_) : 1.0;
  for (std::size_t i = 0; i < np; ++i) {
    double vn = -normal_rhs_[i];
    for (std::size_t j = 0; j < nn; ++j) vn += normal_matrix_[i * nn + j] * s.strengths[j];
    const double rel = std::abs(vn) / scale;
    if (dropped_ && *dropped_ == i) {
      s.dropped_row_residual = rel;
    } else {
      s.tangency_residual = std::max(s.tangency_residual, rel);
    }
  }

  std::vector<double> cx(np), cy(np), psi(np);
  for (std::size_t i = 0; i < np; ++i) {
    cx[i] = g.collocation[i].real();
    cy[i] = g.collocation[i].imag();
  }
  simd::panel_kernels().stream(p, {cx, cy}, psi);
  double weighted = 0.0;
  double total_length = 0.0;
  for (std::size_t i = 0; i < np; ++i) {
    psi[i] += (w_inf_ * g.collocation[i]).imag();
    weighted += psi[i] * g.lengths[i];
    total_length += g.lengths[i];
  }
  s.stream_offset = weighted / total_length;
  for (std::size_t i = 0; i < np; ++i) s.stream_spread = std::max(s.stream_spread, std::abs(psi[i] - s.stream_offset));
  return s;
}

PanelSolution panel_solve(const Body& body, const FarField& far, const PanelOptions& options) {
  return PanelSystem(body, far.w_inf, options).solve(far.circulation);
}

}  // namespace cornerflow
