// SPDX-License-Identifier: Apache-2.0
#include "cornerflow/error.hpp"
#include "cornerflow/simd/stencil_kernels.hpp"

namespace cornerflow::simd {

namespace scalar {

void radial_face_m(const double* inner, const double* outer, const double* inv_g2, std::size_t n, double cs, double ct,
                   double* m) {
  for (std::size_t j = 0; j < n; ++j) {
    const double ps = (outer[j] - inner[j]) * cs;
    const double pt = ((inner[j + 1] - inner[j - 1]) + (outer[j + 1] - outer[j - 1])) * ct;
    m[j] = 0.5 * (ps * ps + pt * pt) * inv_g2[j];
  }
}

void angular_face_m(const double* lo, const double* mid, const double* hi, const double* inv_g2, std::size_t n,
                    double cs, double ct, double* m) {
  for (std::size_t j = 0; j < n; ++j) {
    const double pt = (mid[j + 1] - mid[j]) * ct;
    const double ps = ((hi[j] - lo[j]) + (hi[j + 1] - lo[j + 1])) * cs;
    m[j] = 0.5 * (ps * ps + pt * pt) * inv_g2[j];
  }
}

void stencil_residual(const double* lo, const double* mid, const double* hi, const double* h_in, const double* h_out,
                      const double* h_ang, std::size_t n, double ws, double wt, double* out) {
  for (std::size_t j = 0; j < n; ++j) {
    const double radial = h_out[j] * (hi[j] - mid[j]) - h_in[j] * (mid[j] - lo[j]);
    const double angular = h_ang[j] * (mid[j + 1] - mid[j]) - h_ang[j - 1] * (mid[j] - mid[j - 1]);
    out[j] = ws * radial + wt * angular;
  }
}

}  // namespace scalar

const StencilKernels& stencil_kernels(Isa isa) {
  static const StencilKernels scalar_set{&scalar::radial_face_m, &scalar::angular_face_m, &scalar::stencil_residual};
#if defined(CORNERFLOW_HAVE_AVX2)
  static const StencilKernels avx2_set{&avx2::radial_face_m, &avx2::angular_face_m, &avx2::stencil_residual};
  if (isa == Isa::avx2) {
    if (!isa_available(Isa::avx2)) throw Error(ErrorKind::unsupported, "avx2 kernels not supported on this CPU");
    return avx2_set;
  }
#else
  if (isa == Isa::avx2) throw Error(ErrorKind::unsupported, "avx2 kernels not compiled in");
#endif
  return scalar_set;
}

}  // namespace cornerflow::simd
