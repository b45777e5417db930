// SPDX-License-Identifier: Apache-2.0
#include "cornerflow/field_export.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <vector>

#include "cornerflow/error.hpp"

namespace cornerflow {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

void put(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

template <class Writer>
void to_file(const std::string& path, Writer&& write) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorKind::io, "cannot open " + path + " for writing");
  write(file);
  file.flush();
  if (!file) throw Error(ErrorKind::io, "write to " + path + " failed");
}

}  // namespace

void export_field(const ComplexFlow& flow, const Window& window, std::size_t resolution, std::ostream& out) {
  if (resolution < 2) throw Error(ErrorKind::precondition, "export resolution must be at least 2");
  if (!(window.x_max > window.x_min) || !(window.y_max > window.y_min)) {
    throw Error(ErrorKind::precondition, "empty export window");
  }
  const double dx = (window.x_max - window.x_min) / double(resolution);
  const double dy = (window.y_max - window.y_min) / double(resolution);
  out << "x,y,psi,speed,mach,mask\n";
  std::vector<Point> row(resolution);
  for (std::size_t iy = 0; iy < resolution; ++iy) {
    const double y = window.y_min + (double(iy) + 0.5) * dy;
    std::vector<Point> fluid;
    std::vector<char> mask(resolution);
    for (std::size_t ix = 0; ix < resolution; ++ix) {
      row[ix] = {window.x_min + (double(ix) + 0.5) * dx, y};
      mask[ix] = !flow.in_fluid(row[ix]);
      if (!mask[ix]) fluid.push_back(row[ix]);
    }
    const auto psi = flow.stream(fluid);
    const auto w = flow.velocity(fluid);
    std::size_t k = 0;
    for (std::size_t ix = 0; ix < resolution; ++ix) {
      put(out, row[ix].real());
      out << ',';
      put(out, y);
      out << ',';
      if (mask[ix]) {
        out << "nan,nan,nan,1\n";
        continue;
      }
      put(out, psi[k]);
      out << ',';
      put(out, std::abs(w[k]));
      out << ",nan,0\n";
      ++k;
    }
  }
  if (!out) throw Error(ErrorKind::io, "field export stream failed");
}

void export_field(const ComplexFlow& flow, const Window& window, std::size_t resolution, const std::string& path) {
  to_file(path, [&](std::ostream& out) { export_field(flow, window, resolution, out); });
}

void export_nodes(const CompressibleSolution& solution, std::ostream& out) {
  const ConformalGrid& g = *solution.grid;
  out << "r,theta,x,y,psi,rho,mach,flagged\n";
  for (std::size_t i = 0; i < g.n_r(); ++i) {
    for (std::size_t j = 0; j < g.n_theta(); ++j) {
      const std::size_t k = solution.index(i, j);
      const Point z = g.z(i, j);
      const bool flagged = g.flagged(i, j);
      const double values[] = {std::exp(g.s(i)), g.theta(j), z.real(), z.imag(), solution.psi[k],
                               flagged ? nan : solution.rho[k], flagged ? nan : solution.mach[k]};
      for (const double v : values) {
        put(out, v);
        out << ',';
      }
      out << (flagged ? "1\n" : "0\n");
    }
  }
  if (!out) throw Error(ErrorKind::io, "node export stream failed");
}

void export_nodes(const CompressibleSolution& solution, const std::string& path) {
  to_file(path, [&](std::ostream& out) { export_nodes(solution, out); });
}

}  // namespace cornerflow
