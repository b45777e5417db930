// SPDX-License-Identifier: Apache-2.0
//
// Row kernels of the conformal-grid stream-function stencil. Rows are ghosted
// in theta: for a row pointer p, p[-1] and p[n] hold the periodic neighbours.
// Differences use exponentially fitted weights so that e^(+-s) e^(+-i theta)
// are reproduced exactly.
#pragma once

#include <cstddef>

#include "cornerflow/simd/dispatch.hpp"

namespace cornerflow::simd {

/// m = (psi_s^2 + psi_theta^2) inv_g2 / 2 on the radial faces between rows
/// `inner` and `outer`:  psi_s = (outer - inner) cs,
/// psi_theta = (inner[j+1] - inner[j-1] + outer[j+1] - outer[j-1]) ct.
using RadialFaceKernel = void (*)(const double* inner, const double* outer, const double* inv_g2, std::size_t n,
                                  double cs, double ct, double* m);

/// m on the angular faces (j + 1/2) of row `mid`:
/// psi_theta = (mid[j+1] - mid[j]) ct,
/// psi_s = (hi[j] - lo[j] + hi[j+1] - lo[j+1]) cs.
using AngularFaceKernel = void (*)(const double* lo, const double* mid, const double* hi, const double* inv_g2,
                                   std::size_t n, double cs, double ct, double* m);

/// Divergence-form residual of row `mid`:
///   ws (h_out (hi - mid) - h_in (mid - lo)) + wt (h_ang[j] (mid[j+1] - mid[j]) - h_ang[j-1] (mid[j] - mid[j-1]))
/// with h_ang ghosted like the rows.
using ResidualKernel = void (*)(const double* lo, const double* mid, const double* hi, const double* h_in,
                                const double* h_out, const double* h_ang, std::size_t n, double ws, double wt,
                                double* out);

struct StencilKernels {
  RadialFaceKernel radial_m;
  AngularFaceKernel angular_m;
  ResidualKernel residual;
};

const StencilKernels& stencil_kernels(Isa isa);
inline const StencilKernels& stencil_kernels() { return stencil_kernels(active_isa()); }

namespace scalar {
void radial_face_m(const double* inner, const double* outer, const double* inv_g2, std::size_t n, double cs, double ct,
                   double* m);
void angular_face_m(const double* lo, const double* mid, const double* hi, const double* inv_g2, std::size_t n,
                    double cs, double ct, double* m);
void stencil_residual(const double* lo, const double* mid, const double* hi, const double* h_in, const double* h_out,
                      const double* h_ang, std::size_t n, double ws, double wt, double* out);
}  // namespace scalar

#if defined(CORNERFLOW_HAVE_AVX2)
namespace avx2 {
void radial_face_m(const double* inner, const double* outer, const double* inv_g2, std::size_t n, double cs, double ct,
                   double* m);
void angular_face_m(const double* lo, const double* mid, const double* hi, const double* inv_g2, std::size_t n,
                    double cs, double ct, double* m);
void stencil_residual(const double* lo, const double* mid, const double* hi, const double* h_in, const double* h_out,
                      const double* h_ang, std::size_t n, double ws, double wt, double* out);
}  // namespace avx2
#endif

}  // namespace cornerflow::simd
