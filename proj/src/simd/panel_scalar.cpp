// SPDX-License-Identifier: Apache-2.0
#include "cornerflow/error.hpp"
#include "cornerflow/simd/panel_kernels.hpp"
#include "panel_math.hpp"

namespace cornerflow::simd {

void PanelArrays::resize(std::size_t n) {
  for (auto* v : {&x0, &y0, &tx, &ty, &length, &g0, &g1}) v->assign(n, 0.0);
}

namespace scalar {

void panel_velocity(const PanelArrays& p, TargetSpan t, std::span<double> out_re, std::span<double> out_im) {
  const std::size_t np = p.size();
  for (std::size_t k = 0; k < t.x.size(); ++k) {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t j = 0; j < np; ++j) {
      const auto f = detail::panel_frame(t.x[k], t.y[k], p.x0[j], p.y0[j], p.tx[j], p.ty[j], p.length[j]);
      const auto h = detail::hat_velocity(f, p.tx[j], p.ty[j], p.length[j]);
      re += p.g0[j] * h.start_re + p.g1[j] * h.end_re;
      im += p.g0[j] * h.start_im + p.g1[j] * h.end_im;
    }
    out_re[k] = re;
    out_im[k] = im;
  }
}

void panel_stream(const PanelArrays& p, TargetSpan t, std::span<double> out_psi) {
  const std::size_t np = p.size();
  for (std::size_t k = 0; k < t.x.size(); ++k) {
    double psi = 0.0;
    for (std::size_t j = 0; j < np; ++j) {
      const auto f = detail::panel_frame(t.x[k], t.y[k], p.x0[j], p.y0[j], p.tx[j], p.ty[j], p.length[j]);
      const auto h = detail::hat_stream(f, p.length[j], detail::log_distance_to_end(f, p.length[j]));
      psi += p.g0[j] * h.start + p.g1[j] * h.end;
    }
    out_psi[k] = psi;
  }
}

}  // namespace scalar

const PanelKernels& panel_kernels(Isa isa) {
  static const PanelKernels scalar_set{&scalar::panel_velocity, &scalar::panel_stream};
#if defined(CORNERFLOW_HAVE_AVX2)
  static const PanelKernels avx2_set{&avx2::panel_velocity, &avx2::panel_stream};
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
