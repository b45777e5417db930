// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "cornerflow/analysis.hpp"
#include "cornerflow/error.hpp"

namespace cornerflow {

namespace {

KuttaRoot root_from_fits(const CornerReport& at_zero, const CornerReport& at_one, double length_scale) {
  KuttaRoot root;
  root.corner_id = at_zero.corner_id;
  root.a1_at_zero = at_zero.a1;
  root.slope = at_one.a1 - at_zero.a1;
  root.threshold = at_zero.threshold;
  const double p = pi / at_zero.beta;
  if (std::abs(root.slope) < 1e-12 * std::pow(length_scale, -p)) {
    root.degenerate = true;
    return root;
  }
  root.circulation = -root.a1_at_zero / root.slope;
  const double t = root.circulation;
  root.uncertainty = (std::abs(1.0 - t) * at_zero.a1_uncertainty + std::abs(t) * at_one.a1_uncertainty) / std::abs(root.slope);
  return root;
}

KuttaRoot measure_root(const PanelSystem& system, const ComplexFlow& f0, const ComplexFlow& f1, std::size_t corner_id,
                       const CensusOptions& options) {
  const Body& body = system.geometry().body;
  if (corner_id >= body.corners().size()) {
    throw Error(ErrorKind::precondition, "corner id out of range", {{"corner", double(corner_id)}});
  }
  if (!body.corners()[corner_id].protruding) {
    throw Error(ErrorKind::precondition, "Kutta condition needs a protruding corner", {{"corner", double(corner_id)}});
  }
  const auto radii = default_fit_radii(body, corner_id);
  const auto r0 = fit_corner(f0, body, corner_id, radii, options.samples, options.fit);
  const auto r1 = fit_corner(f1, body, corner_id, radii, options.samples, options.fit);
  return root_from_fits(r0, r1, body.circumradius());
}

}  // namespace

KuttaRoot kutta_solve(const PanelSystem& system, std::size_t corner_id, const CensusOptions& options) {
  const auto f0 = ComplexFlow::panel(system.solve(0.0));
  const auto f1 = ComplexFlow::panel(system.solve(1.0));
  auto root = measure_root(system, f0, f1, corner_id, options);
  if (root.degenerate) {
    throw Error(ErrorKind::degenerate_kutta, "corner coefficient does not depend on the circulation",
                {{"corner", double(corner_id)}, {"slope", root.slope}});
  }
  return root;
}

KuttaRoot kutta_solve(const Body& body, Point w_inf, std::size_t corner_id, const CensusOptions& options) {
  return kutta_solve(PanelSystem(body, w_inf, options.panels), corner_id, options);
}

std::string_view CensusResult::verdict() const noexcept {
  if (!all_regular_possible) return "no circulation regularizes all corners";
  if (degenerate_coincidence) return "degenerate coincidence";
  return "all corners regular at one circulation";
}

CensusResult corner_census(const Body& body, Point w_inf, const CensusOptions& options) {
  CensusResult result;
  for (std::size_t i = 0; i < body.corners().size(); ++i) {
    if (body.corners()[i].protruding) result.corners.push_back(i);
  }
  if (result.corners.size() < 2) throw Error(ErrorKind::precondition, "census needs at least two protruding corners");

  const PanelSystem system(body, w_inf, options.panels);
  const auto f0 = ComplexFlow::panel(system.solve(0.0));
  const auto f1 = ComplexFlow::panel(system.solve(1.0));
  for (std::size_t id : result.corners) result.roots.push_back(measure_root(system, f0, f1, id, options));

  // Regular set of each corner: an interval (or everything / nothing when degenerate).
  struct Event {
    double at;
    int delta;
  };
  std::vector<Event> events;
  std::size_t always = 0;
  for (const auto& r : result.roots) {
    if (r.degenerate) {
      always += std::abs(r.a1_at_zero) <= r.threshold;
      continue;
    }
    const double half = r.threshold / std::abs(r.slope);
    events.push_back({r.circulation - half, +1});
    events.push_back({r.circulation + half, -1});
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    return a.at < b.at || (a.at == b.at && a.delta > b.delta);
  });
  int open = 0, best = 0;
  for (const auto& e : events) best = std::max(best, open += e.delta);
  result.max_simultaneously_regular = always + static_cast<std::size_t>(best);
  result.min_singular = result.corners.size() - result.max_simultaneously_regular;
  result.all_regular_possible = result.min_singular == 0;

  for (std::size_t i = 0; i < result.roots.size(); ++i) {
    for (std::size_t j = i + 1; j < result.roots.size(); ++j) {
      const auto& a = result.roots[i];
      const auto& b = result.roots[j];
      if (a.degenerate || b.degenerate) continue;
      if (std::abs(a.circulation - b.circulation) <= options.coincidence_factor * (a.uncertainty + b.uncertainty)) {
        result.degenerate_coincidence = true;
      }
    }
  }

  // Redundant sweep with fresh fits.
  std::vector<double> grid;
  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (const auto& r : result.roots) {
    if (r.degenerate) continue;
    lo = any ? std::min(lo, r.circulation) : r.circulation;
    hi = any ? std::max(hi, r.circulation) : r.circulation;
    any = true;
  }
  const double margin = std::max(0.25 * (hi - lo), std::abs(w_inf) * body.circumradius());
  lo -= margin;
  hi += margin;
  const std::size_t n = std::max<std::size_t>(options.grid_points, 2);
  for (std::size_t k = 0; k < n; ++k) grid.push_back(lo + (hi - lo) * double(k) / double(n - 1));
  for (const auto& r : result.roots) {
    if (!r.degenerate) grid.push_back(r.circulation);
  }
  std::sort(grid.begin(), grid.end());

  result.sweep_min_singular = result.corners.size();
  for (double g : grid) {
    const auto flow = ComplexFlow::panel(system.solve(g));
    CensusEntry entry{g, {}};
    for (std::size_t id : result.corners) {
      const auto radii = default_fit_radii(body, id);
      if (fit_corner(flow, body, id, radii, options.samples, options.fit).singular) entry.singular.push_back(id);
    }
    result.sweep_min_singular = std::min(result.sweep_min_singular, entry.singular.size());
    result.sweep.push_back(std::move(entry));
  }
  return result;
}

Window window_around(const Body& body, double margin_circumradii) {
  const double h = (1.0 + margin_circumradii) * body.circumradius();
  const Point c = body.centroid();
  return {c.real() - h, c.real() + h, c.imag() - h, c.imag() + h};
}

SignComponents sign_component_census(const ComplexFlow& flow, const Window& window, std::size_t resolution) {
  if (resolution < 8) throw Error(ErrorKind::precondition, "sign census needs at least 8 cells per side");
  if (!(window.x_max > window.x_min && window.y_max > window.y_min)) {
    throw Error(ErrorKind::precondition, "empty sign census window");
  }
  const Body* body = flow.body();
  SignComponents out;
  const double dx = (window.x_max - window.x_min) / double(resolution);
  const double dy = (window.y_max - window.y_min) / double(resolution);
  if (body) {
    const Point c = body->centroid();
    const double need = 4.0 * body->circumradius() * (1.0 - 1e-9);
    if (c.real() - window.x_min < need || window.x_max - c.real() < need || c.imag() - window.y_min < need ||
        window.y_max - c.imag() < need) {
      throw Error(ErrorKind::precondition, "sign census window must clear the body by three circumradii");
    }
    double wall = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < body->corners().size(); ++i) {
      if (body->corners()[i].genuine()) wall = std::min(wall, body->adjacent_side_min_length(i));
    }
    out.inconclusive = std::max(dx, dy) > 0.05 * wall;
  }

  const std::size_t n = resolution;
  std::vector<Point> centers(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      centers[j * n + i] = {window.x_min + (double(i) + 0.5) * dx, window.y_min + (double(j) + 0.5) * dy};
    }
  }
  std::vector<std::size_t> fluid;
  for (std::size_t k = 0; k < centers.size(); ++k) {
    if (flow.in_fluid(centers[k])) fluid.push_back(k);
  }
  std::vector<Point> fluid_points;
  fluid_points.reserve(fluid.size());
  for (std::size_t k : fluid) fluid_points.push_back(centers[k]);
  const auto psi = flow.stream(fluid_points);

  double scale = std::max(std::abs(flow.far_field().w_inf), 1.0);
  if (body) scale *= std::max(body->circumradius(), 1.0);
  out.tolerance = std::max(1e-9 * scale, stream_noise_floor(flow));

  // 0 masked, 2 unsigned, +1 / -1 signed.
  std::vector<int> sign(n * n, 0);
  for (std::size_t q = 0; q < fluid.size(); ++q) {
    sign[fluid[q]] = psi[q] > out.tolerance ? 1 : (psi[q] < -out.tolerance ? -1 : 2);
  }
  out.masked_cells = n * n - fluid.size();
  out.unsigned_cells = static_cast<std::size_t>(std::count(sign.begin(), sign.end(), 2));

  std::vector<char> near(n * n, 0);
  if (body) {
    const double reach = 2.0 * std::hypot(dx, dy);
    for (std::size_t k : fluid) near[k] = body->boundary_distance(centers[k]) < reach;
  }
  auto linked = [&](std::size_t a, std::size_t b) {
    if (sign[a] != sign[b]) return false;
    if ((near[a] || near[b]) && body->segment_hits_boundary(centers[a], centers[b])) return false;
    return true;
  };

  std::vector<char> seen(n * n, 0);
  std::deque<std::size_t> queue;
  for (std::size_t start = 0; start < n * n; ++start) {
    if (seen[start] || (sign[start] != 1 && sign[start] != -1)) continue;
    bool touches_edge = false;
    seen[start] = 1;
    queue.push_back(start);
    while (!queue.empty()) {
      const std::size_t k = queue.front();
      queue.pop_front();
      const std::size_t i = k % n, j = k / n;
      if (i == 0 || j == 0 || i == n - 1 || j == n - 1) touches_edge = true;
      const std::size_t nb[4] = {i > 0 ? k - 1 : k, i + 1 < n ? k + 1 : k, j > 0 ? k - n : k, j + 1 < n ? k + n : k};
      for (std::size_t m : nb) {
        if (m == k || seen[m] || !linked(k, m)) continue;
        seen[m] = 1;
        queue.push_back(m);
      }
    }
    if (sign[start] == 1) {
      ++out.components_positive;
      out.bounded_positive += !touches_edge;
    } else {
      ++out.components_negative;
      out.bounded_negative += !touches_edge;
    }
  }
  return out;
}

}  // namespace cornerflow
