// SPDX-License-Identifier: Apache-2.0
//
// AVX2 panel sums: four targets per register, panels broadcast one at a time in
// the same order as the scalar reference. Remainder targets go to the scalar
// kernel.
#include <immintrin.h>

#include "cornerflow/simd/panel_kernels.hpp"
#include "panel_math.hpp"
#include "vec_math_avx2.hpp"

namespace cornerflow::simd::avx2 {

using detail::splat;

namespace {

struct Frame {
  __m256d xi, eta, xl, log_ratio, angle;
};

inline Frame frame(__m256d x, __m256d y, const PanelArrays& p, std::size_t j) {
  const __m256d dx = _mm256_sub_pd(x, splat(p.x0[j]));
  const __m256d dy = _mm256_sub_pd(y, splat(p.y0[j]));
  const __m256d tx = splat(p.tx[j]);
  const __m256d ty = splat(p.ty[j]);
  const __m256d len = splat(p.length[j]);
  Frame f;
  f.xi = _mm256_fmadd_pd(dx, tx, _mm256_mul_pd(dy, ty));
  f.eta = _mm256_fmsub_pd(dy, tx, _mm256_mul_pd(dx, ty));
  f.xl = _mm256_sub_pd(f.xi, len);
  const __m256d eta2 = _mm256_mul_pd(f.eta, f.eta);
  const __m256d r0 = _mm256_fmadd_pd(f.xi, f.xi, eta2);
  const __m256d r1 = _mm256_fmadd_pd(f.xl, f.xl, eta2);
  f.log_ratio = _mm256_mul_pd(splat(0.5), detail::vlog(_mm256_div_pd(r0, r1)));
  const __m256d ay = _mm256_mul_pd(_mm256_sub_pd(_mm256_setzero_pd(), f.eta), len);
  f.angle = detail::vatan2(ay, _mm256_fmadd_pd(f.xi, f.xl, eta2));
  return f;
}

}  // namespace

void panel_velocity(const PanelArrays& p, TargetSpan t, std::span<double> out_re, std::span<double> out_im) {
  const std::size_t n = t.x.size();
  const std::size_t np = p.size();
  const __m256d inv2pi = splat(simd::detail::inv_two_pi);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d x = _mm256_loadu_pd(t.x.data() + k);
    const __m256d y = _mm256_loadu_pd(t.y.data() + k);
    __m256d re = _mm256_setzero_pd();
    __m256d im = _mm256_setzero_pd();
    for (std::size_t j = 0; j < np; ++j) {
      const Frame f = frame(x, y, p, j);
      const __m256d tx = splat(p.tx[j]);
      const __m256d ty = splat(p.ty[j]);
      const __m256d inv_len = splat(1.0 / p.length[j]);
      // M / L = (Z Lambda - L) / L
      const __m256d m_re = _mm256_mul_pd(
          _mm256_sub_pd(_mm256_fmsub_pd(f.xi, f.log_ratio, _mm256_mul_pd(f.eta, f.angle)), splat(p.length[j])), inv_len);
      const __m256d m_im = _mm256_mul_pd(_mm256_fmadd_pd(f.xi, f.angle, _mm256_mul_pd(f.eta, f.log_ratio)), inv_len);
      const __m256d g0 = splat(p.g0[j]);
      const __m256d g1 = splat(p.g1[j]);
      // C = g0 Lambda + (g1 - g0) M / L
      const __m256d c_re = _mm256_fmadd_pd(_mm256_sub_pd(g1, g0), m_re, _mm256_mul_pd(g0, f.log_ratio));
      const __m256d c_im = _mm256_fmadd_pd(_mm256_sub_pd(g1, g0), m_im, _mm256_mul_pd(g0, f.angle));
      re = _mm256_add_pd(re, _mm256_fmsub_pd(c_im, tx, _mm256_mul_pd(c_re, ty)));
      im = _mm256_sub_pd(im, _mm256_fmadd_pd(c_re, tx, _mm256_mul_pd(c_im, ty)));
    }
    _mm256_storeu_pd(out_re.data() + k, _mm256_mul_pd(re, inv2pi));
    _mm256_storeu_pd(out_im.data() + k, _mm256_mul_pd(im, inv2pi));
  }
  if (k < n) {
    scalar::panel_velocity(p, {t.x.subspan(k), t.y.subspan(k)}, out_re.subspan(k), out_im.subspan(k));
  }
}

void panel_stream(const PanelArrays& p, TargetSpan t, std::span<double> out_psi) {
  const std::size_t n = t.x.size();
  const std::size_t np = p.size();
  const __m256d half = splat(0.5);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d x = _mm256_loadu_pd(t.x.data() + k);
    const __m256d y = _mm256_loadu_pd(t.y.data() + k);
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t j = 0; j < np; ++j) {
      const Frame f = frame(x, y, p, j);
      const double len = p.length[j];
      const __m256d vlen = splat(len);
      const __m256d eta2 = _mm256_mul_pd(f.eta, f.eta);
      const __m256d log_r1 = _mm256_mul_pd(half, detail::vlog(_mm256_fmadd_pd(f.xl, f.xl, eta2)));
      const __m256d re_zl = _mm256_fmsub_pd(f.xi, f.log_ratio, _mm256_mul_pd(f.eta, f.angle));
      const __m256d z2_re = _mm256_fmsub_pd(f.xi, f.xi, eta2);
      const __m256d two_xe = _mm256_mul_pd(splat(2.0), _mm256_mul_pd(f.xi, f.eta));
      const __m256d re_z2l = _mm256_fmsub_pd(z2_re, f.log_ratio, _mm256_mul_pd(two_xe, f.angle));
      const __m256d i0 = _mm256_sub_pd(_mm256_fmadd_pd(vlen, log_r1, re_zl), vlen);
      __m256d i1 = _mm256_fmadd_pd(splat(0.5 * len * len), log_r1, _mm256_mul_pd(half, re_z2l));
      i1 = _mm256_sub_pd(i1, _mm256_fmadd_pd(splat(0.5 * len), f.xi, splat(0.25 * len * len)));
      const __m256d end = _mm256_mul_pd(i1, splat(1.0 / len));
      // Re J = g0 (I0 - I1/L) + g1 I1/L
      const __m256d re_j = _mm256_fmadd_pd(splat(p.g0[j]), _mm256_sub_pd(i0, end), _mm256_mul_pd(splat(p.g1[j]), end));
      acc = _mm256_add_pd(acc, re_j);
    }
    _mm256_storeu_pd(out_psi.data() + k, _mm256_mul_pd(acc, splat(-simd::detail::inv_two_pi)));
  }
  if (k < n) scalar::panel_stream(p, {t.x.subspan(k), t.y.subspan(k)}, out_psi.subspan(k));
}

void log4(const double* in, double* out) { _mm256_storeu_pd(out, detail::vlog(_mm256_loadu_pd(in))); }

void atan2_4(const double* y, const double* x, double* out) {
  _mm256_storeu_pd(out, detail::vatan2(_mm256_loadu_pd(y), _mm256_loadu_pd(x)));
}

}  // namespace cornerflow::simd::avx2
