// SPDX-License-Identifier: Apache-2.0
//
// Same operation order as the scalar rows, without fused multiply-adds, so
// results match the reference bit for bit.
#include <immintrin.h>

#include "cornerflow/simd/stencil_kernels.hpp"

namespace cornerflow::simd::avx2 {

namespace {
inline __m256d ld(const double* p) { return _mm256_loadu_pd(p); }
}  // namespace

void radial_face_m(const double* inner, const double* outer, const double* inv_g2, std::size_t n, double cs, double ct,
                   double* m) {
  const __m256d vcs = _mm256_set1_pd(cs);
  const __m256d vct = _mm256_set1_pd(ct);
  const __m256d half = _mm256_set1_pd(0.5);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d ps = _mm256_mul_pd(_mm256_sub_pd(ld(outer + j), ld(inner + j)), vcs);
    const __m256d d = _mm256_add_pd(_mm256_sub_pd(ld(inner + j + 1), ld(inner + j - 1)),
                                    _mm256_sub_pd(ld(outer + j + 1), ld(outer + j - 1)));
    const __m256d pt = _mm256_mul_pd(d, vct);
    const __m256d sq = _mm256_add_pd(_mm256_mul_pd(ps, ps), _mm256_mul_pd(pt, pt));
    _mm256_storeu_pd(m + j, _mm256_mul_pd(_mm256_mul_pd(half, sq), ld(inv_g2 + j)));
  }
  if (j < n) scalar::radial_face_m(inner + j, outer + j, inv_g2 + j, n - j, cs, ct, m + j);
}

void angular_face_m(const double* lo, const double* mid, const double* hi, const double* inv_g2, std::size_t n,
                    double cs, double ct, double* m) {
  const __m256d vcs = _mm256_set1_pd(cs);
  const __m256d vct = _mm256_set1_pd(ct);
  const __m256d half = _mm256_set1_pd(0.5);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d pt = _mm256_mul_pd(_mm256_sub_pd(ld(mid + j + 1), ld(mid + j)), vct);
    const __m256d e = _mm256_add_pd(_mm256_sub_pd(ld(hi + j), ld(lo + j)), _mm256_sub_pd(ld(hi + j + 1), ld(lo + j + 1)));
    const __m256d ps = _mm256_mul_pd(e, vcs);
    const __m256d sq = _mm256_add_pd(_mm256_mul_pd(ps, ps), _mm256_mul_pd(pt, pt));
    _mm256_storeu_pd(m + j, _mm256_mul_pd(_mm256_mul_pd(half, sq), ld(inv_g2 + j)));
  }
  if (j < n) scalar::angular_face_m(lo + j, mid + j, hi + j, inv_g2 + j, n - j, cs, ct, m + j);
}

void stencil_residual(const double* lo, const double* mid, const double* hi, const double* h_in, const double* h_out,
                      const double* h_ang, std::size_t n, double ws, double wt, double* out) {
  const __m256d vws = _mm256_set1_pd(ws);
  const __m256d vwt = _mm256_set1_pd(wt);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d c = ld(mid + j);
    const __m256d radial = _mm256_sub_pd(_mm256_mul_pd(ld(h_out + j), _mm256_sub_pd(ld(hi + j), c)),
                                         _mm256_mul_pd(ld(h_in + j), _mm256_sub_pd(c, ld(lo + j))));
    const __m256d angular = _mm256_sub_pd(_mm256_mul_pd(ld(h_ang + j), _mm256_sub_pd(ld(mid + j + 1), c)),
                                          _mm256_mul_pd(ld(h_ang + j - 1), _mm256_sub_pd(c, ld(mid + j - 1))));
    _mm256_storeu_pd(out + j, _mm256_add_pd(_mm256_mul_pd(vws, radial), _mm256_mul_pd(vwt, angular)));
  }
  if (j < n) scalar::stencil_residual(lo + j, mid + j, hi + j, h_in + j, h_out + j, h_ang + j, n - j, ws, wt, out + j);
}

}  // namespace cornerflow::simd::avx2
