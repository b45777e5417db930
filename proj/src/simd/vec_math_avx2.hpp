// SPDX-License-Identifier: Apache-2.0
//
// Four-lane double-precision log and atan2 for AVX2. Reductions and minimax
// coefficients follow the classic fdlibm kernels (e_log.c, s_atan.c); both
// stay within a few ulp of the libm results used by the scalar kernels.
// Infinite inputs are not handled; callers never produce them.
#pragma once

#if !defined(__AVX2__) || !defined(__FMA__)
#error "vec_math_avx2.hpp must be compiled with -mavx2 -mfma"
#endif

#include <immintrin.h>

namespace cornerflow::simd::avx2::detail {

inline __m256d splat(double v) { return _mm256_set1_pd(v); }

inline __m256d vlog(__m256d x) {
  const __m256d ln2_hi = splat(6.93147180369123816490e-01);
  const __m256d ln2_lo = splat(1.90821492927058770002e-10);
  const __m256d lg1 = splat(6.666666666666735130e-01);
  const __m256d lg2 = splat(3.999999999940941908e-01);
  const __m256d lg3 = splat(2.857142874366239149e-01);
  const __m256d lg4 = splat(2.222219843214978396e-01);
  const __m256d lg5 = splat(1.818357216161805012e-01);
  const __m256d lg6 = splat(1.531383769920937332e-01);
  const __m256d lg7 = splat(1.479819860511658591e-01);

  // Subnormals: scale by 2^54 and compensate in the exponent.
  const __m256d tiny = _mm256_cmp_pd(x, splat(2.2250738585072014e-308), _CMP_LT_OQ);
  const __m256d xs = _mm256_blendv_pd(x, _mm256_mul_pd(x, splat(18014398509481984.0)), tiny);
  const __m256d kbias = _mm256_and_pd(tiny, splat(54.0));

  const __m256i bits = _mm256_castpd_si256(xs);
  const __m256i expo = _mm256_srli_epi64(bits, 52);
  const __m256i magic = _mm256_set1_epi64x(0x4330000000000000LL);
  __m256d k = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(expo, magic)), splat(4503599627370496.0));
  k = _mm256_sub_pd(k, _mm256_add_pd(splat(1023.0), kbias));

  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
  const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000LL);
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));
  const __m256d big = _mm256_cmp_pd(m, splat(1.4142135623730951), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, splat(0.5)), big);
  k = _mm256_add_pd(k, _mm256_and_pd(big, splat(1.0)));

  const __m256d f = _mm256_sub_pd(m, splat(1.0));
  const __m256d s = _mm256_div_pd(f, _mm256_add_pd(splat(2.0), f));
  const __m256d z = _mm256_mul_pd(s, s);
  const __m256d w = _mm256_mul_pd(z, z);
  const __m256d t1 = _mm256_mul_pd(w, _mm256_fmadd_pd(w, _mm256_fmadd_pd(w, lg6, lg4), lg2));
  const __m256d t2 = _mm256_mul_pd(z, _mm256_fmadd_pd(w, _mm256_fmadd_pd(w, _mm256_fmadd_pd(w, lg7, lg5), lg3), lg1));
  const __m256d r = _mm256_add_pd(t2, t1);
  const __m256d hfsq = _mm256_mul_pd(splat(0.5), _mm256_mul_pd(f, f));
  // k ln2_hi - ((hfsq - (s (hfsq + R) + k ln2_lo)) - f)
  const __m256d inner = _mm256_fmadd_pd(s, _mm256_add_pd(hfsq, r), _mm256_mul_pd(k, ln2_lo));
  __m256d result = _mm256_fmsub_pd(k, ln2_hi, _mm256_sub_pd(_mm256_sub_pd(hfsq, inner), f));

  const __m256d zero = _mm256_setzero_pd();
  const __m256d is_zero = _mm256_cmp_pd(x, zero, _CMP_EQ_OQ);
  const __m256d is_bad = _mm256_cmp_pd(x, zero, _CMP_NGE_UQ);  // negative or NaN
  result = _mm256_blendv_pd(result, splat(-__builtin_inf()), is_zero);
  result = _mm256_blendv_pd(result, splat(__builtin_nan("")), is_bad);
  return result;
}

// atan(t) for |t| <= 7/16.
inline __m256d atan_kernel(__m256d t) {
  const __m256d z = _mm256_mul_pd(t, t);
  const __m256d w = _mm256_mul_pd(z, z);
  __m256d s1 = splat(1.62858201153657823623e-02);
  s1 = _mm256_fmadd_pd(w, s1, splat(4.97687799461593236017e-02));
  s1 = _mm256_fmadd_pd(w, s1, splat(6.66107313738753120669e-02));
  s1 = _mm256_fmadd_pd(w, s1, splat(9.09088713343650656196e-02));
  s1 = _mm256_fmadd_pd(w, s1, splat(1.42857142725034663711e-01));
  s1 = _mm256_fmadd_pd(w, s1, splat(3.33333333333329318027e-01));
  s1 = _mm256_mul_pd(z, s1);
  __m256d s2 = splat(-3.65315727442169155270e-02);
  s2 = _mm256_fmadd_pd(w, s2, splat(-5.83357013379057348645e-02));
  s2 = _mm256_fmadd_pd(w, s2, splat(-7.69187620504482999495e-02));
  s2 = _mm256_fmadd_pd(w, s2, splat(-1.11111104054623557880e-01));
  s2 = _mm256_fmadd_pd(w, s2, splat(-1.99999999998764832476e-01));
  s2 = _mm256_mul_pd(w, s2);
  return _mm256_fnmadd_pd(t, _mm256_add_pd(s1, s2), t);
}

inline __m256d vatan2(__m256d y, __m256d x) {
  const __m256d sign_mask = splat(-0.0);
  const __m256d ax = _mm256_andnot_pd(sign_mask, x);
  const __m256d ay = _mm256_andnot_pd(sign_mask, y);
  const __m256d swap = _mm256_cmp_pd(ay, ax, _CMP_GT_OQ);
  const __m256d num = _mm256_min_pd(ax, ay);
  const __m256d den = _mm256_max_pd(ax, ay);
  const __m256d den_zero = _mm256_cmp_pd(den, _mm256_setzero_pd(), _CMP_EQ_OQ);
  __m256d t = _mm256_div_pd(num, _mm256_blendv_pd(den, splat(1.0), den_zero));

  // Second reduction onto |t| <= tan(pi/8) via atan(t) = pi/4 + atan((t-1)/(t+1)).
  const __m256d upper = _mm256_cmp_pd(t, splat(0.41421356237309503), _CMP_GT_OQ);
  const __m256d tr = _mm256_div_pd(_mm256_sub_pd(t, splat(1.0)), _mm256_add_pd(t, splat(1.0)));
  t = _mm256_blendv_pd(t, tr, upper);
  __m256d a = atan_kernel(t);
  const __m256d with_quarter =
      _mm256_add_pd(splat(7.85398163397448278999e-01), _mm256_add_pd(a, splat(3.06161699786838301793e-17)));
  a = _mm256_blendv_pd(a, with_quarter, upper);

  const __m256d from_half =
      _mm256_sub_pd(splat(1.57079632679489655800e+00), _mm256_sub_pd(a, splat(6.12323399573676603587e-17)));
  a = _mm256_blendv_pd(a, from_half, swap);

  // Left half plane (including x = -0).
  const __m256d from_pi =
      _mm256_sub_pd(splat(3.1415926535897931160e+00), _mm256_sub_pd(a, splat(1.2246467991473531772e-16)));
  a = _mm256_blendv_pd(a, from_pi, x);

  return _mm256_or_pd(a, _mm256_and_pd(sign_mask, y));
}

}  // namespace cornerflow::simd::avx2::detail
