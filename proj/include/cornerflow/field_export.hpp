// SPDX-License-Identifier: Apache-2.0
//
// CSV export of flow fields for plotting tools. Numbers are written with %.17g
// so that a read-back reproduces the doubles exactly.
#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>

#include "cornerflow/analysis.hpp"
#include "cornerflow/compressible.hpp"

namespace cornerflow {

/// Cell-centred grid over `window`: columns x, y, psi, speed, mach, mask.
/// Cells inside the body or on a plate get mask = 1 and NaN values; mach is
/// NaN throughout for incompressible flows.
void export_field(const ComplexFlow& flow, const Window& window, std::size_t resolution, std::ostream& out);
void export_field(const ComplexFlow& flow, const Window& window, std::size_t resolution, const std::string& path);

/// Node table of a compressible solution: r, theta, x, y, psi, rho, mach, flagged.
/// r and theta are polar coordinates of the node's circle-plane preimage.
void export_nodes(const CompressibleSolution& solution, std::ostream& out);
void export_nodes(const CompressibleSolution& solution, const std::string& path);

}  // namespace cornerflow
