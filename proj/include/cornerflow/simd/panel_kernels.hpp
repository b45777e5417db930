// SPDX-License-Identifier: Apache-2.0
//
// Induced velocity and stream function of straight vortex panels whose strength
// varies linearly from g0 (start) to g1 (end). Sums run over every panel for
// every target; free-stream terms are added by the caller.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cornerflow/simd/dispatch.hpp"

namespace cornerflow::simd {

/// Structure-of-arrays panel storage, one entry per panel.
struct PanelArrays {
  std::vector<double> x0, y0;  // start point
  std::vector<double> tx, ty;  // unit tangent (start -> end)
  std::vector<double> length;
  std::vector<double> g0, g1;  // vortex strength at start / end

  std::size_t size() const noexcept { return length.size(); }
  void resize(std::size_t n);
};

struct TargetSpan {
  std::span<const double> x;
  std::span<const double> y;
};

/// out_u[k] + i out_v[k] = sum over panels of the complex velocity w = u - i v_y
/// (so out_v holds Im w = -v_y).
using VelocityKernel = void (*)(const PanelArrays& panels, TargetSpan targets, std::span<double> out_re_w,
                                std::span<double> out_im_w);
/// out_psi[k] = sum over panels of the panel stream function (Im W).
using StreamKernel = void (*)(const PanelArrays& panels, TargetSpan targets, std::span<double> out_psi);

struct PanelKernels {
  VelocityKernel velocity;
  StreamKernel stream;
};

const PanelKernels& panel_kernels(Isa isa);
inline const PanelKernels& panel_kernels() { return panel_kernels(active_isa()); }

namespace scalar {
void panel_velocity(const PanelArrays& panels, TargetSpan targets, std::span<double> out_re_w,
                    std::span<double> out_im_w);
void panel_stream(const PanelArrays& panels, TargetSpan targets, std::span<double> out_psi);
}  // namespace scalar

#if defined(CORNERFLOW_HAVE_AVX2)
namespace avx2 {
void panel_velocity(const PanelArrays& panels, TargetSpan targets, std::span<double> out_re_w,
                    std::span<double> out_im_w);
void panel_stream(const PanelArrays& panels, TargetSpan targets, std::span<double> out_psi);

/// Lane-wise natural log and atan2, exposed for accuracy tests.
void log4(const double* in, double* out);
void atan2_4(const double* y, const double* x, double* out);
}  // namespace avx2
#endif

}  // namespace cornerflow::simd
