// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include "simd/kernels.h"

namespace taccompress::simd::detail {

uint64_t sum_squared_diff_u8_avx2(const uint8_t* a, const uint8_t* b,
                                  size_t n) {
  const __m256i zero = _mm256_setzero_si256();
  __m256i total = _mm256_setzero_si256();  // 4 x u64
  size_t i = 0;
  while (i + 32 <= n) {
    // Each 32-bit lane gains at most 2 * 255^2 per step; flush before
    // 2^31 is reachable.
    __m256i acc = _mm256_setzero_si256();
    for (int step = 0; step < 8192 && i + 32 <= n; ++step, i += 32) {
      const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
      const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
      const __m256i dlo = _mm256_sub_epi16(_mm256_unpacklo_epi8(va, zero),
                                           _mm256_unpacklo_epi8(vb, zero));
      const __m256i dhi = _mm256_sub_epi16(_mm256_unpackhi_epi8(va, zero),
                                           _mm256_unpackhi_epi8(vb, zero));
      acc = _mm256_add_epi32(acc, _mm256_madd_epi16(dlo, dlo));
      acc = _mm256_add_epi32(acc, _mm256_madd_epi16(dhi, dhi));
    }
    total = _mm256_add_epi64(total, _mm256_unpacklo_epi32(acc, zero));
    total = _mm256_add_epi64(total, _mm256_unpackhi_epi32(acc, zero));
  }
  alignas(32) uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), total);
  uint64_t sum = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  return sum + sum_squared_diff_u8_scalar(a + i, b + i, n - i);
}

void med_residuals_u8_avx2(const uint8_t* cur, const uint8_t* prev, size_t n,
                           size_t stride, uint8_t* residual, uint8_t* bucket) {
  const __m256i ones = _mm256_set1_epi8(1);
  const __m256i zero = _mm256_setzero_si256();
  const __m256i above = _mm256_set1_epi8(static_cast<char>(kActivityThreshold + 1));
  size_t i = stride;
  for (; i + 32 <= n; i += 32) {
    const __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(cur + i));
    const __m256i l = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(cur + i - stride));
    const __m256i u = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(prev + i));
    const __m256i ul = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(prev + i - stride));

    const __m256i lo = _mm256_min_epu8(l, u);
    const __m256i hi = _mm256_max_epu8(l, u);
    const __m256i ul_ge_hi = _mm256_cmpeq_epi8(_mm256_max_epu8(ul, hi), ul);
    const __m256i ul_le_lo = _mm256_cmpeq_epi8(_mm256_min_epu8(ul, lo), ul);
    // The gradient lies inside [lo, hi] whenever it is selected, so the
    // wrapping byte arithmetic is exact.
    __m256i pred = _mm256_sub_epi8(_mm256_add_epi8(l, u), ul);
    pred = _mm256_blendv_epi8(pred, hi, ul_le_lo);
    pred = _mm256_blendv_epi8(pred, lo, ul_ge_hi);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(residual + i), _mm256_sub_epi8(x, pred));

    const __m256i dl = _mm256_or_si256(_mm256_subs_epu8(l, ul), _mm256_subs_epu8(ul, l));
    const __m256i du = _mm256_or_si256(_mm256_subs_epu8(u, ul), _mm256_subs_epu8(ul, u));
    const __m256i act = _mm256_adds_epu8(dl, du);
    const __m256i is_zero = _mm256_cmpeq_epi8(act, zero);
    const __m256i is_high = _mm256_cmpeq_epi8(_mm256_max_epu8(act, above), act);
    const __m256i b = _mm256_add_epi8(_mm256_andnot_si256(is_zero, ones),
                                      _mm256_and_si256(is_high, ones));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(bucket + i), b);
  }
  for (; i < n; ++i) {
    const uint8_t l = cur[i - stride];
    const uint8_t u = prev[i];
    const uint8_t ul = prev[i - stride];
    residual[i] = static_cast<uint8_t>(cur[i] - med(l, u, ul));
    bucket[i] = activity_bucket(l, u, ul, kActivityThreshold);
  }
}

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double dot_f32_avx2(const float* a, const float* b, size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 va = _mm256_loadu_ps(a + i);
    const __m256 vb = _mm256_loadu_ps(b + i);
    acc0 = _mm256_fmadd_pd(_mm256_cvtps_pd(_mm256_castps256_ps128(va)),
                           _mm256_cvtps_pd(_mm256_castps256_ps128(vb)), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_cvtps_pd(_mm256_extractf128_ps(va, 1)),
                           _mm256_cvtps_pd(_mm256_extractf128_ps(vb, 1)), acc1);
  }
  return hsum(_mm256_add_pd(acc0, acc1)) + dot_f32_scalar(a + i, b + i, n - i);
}

double squared_distance_f32_avx2(const float* a, const float* b, size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 va = _mm256_loadu_ps(a + i);
    const __m256 vb = _mm256_loadu_ps(b + i);
    const __m256d d0 = _mm256_sub_pd(_mm256_cvtps_pd(_mm256_castps256_ps128(va)),
                                     _mm256_cvtps_pd(_mm256_castps256_ps128(vb)));
    const __m256d d1 = _mm256_sub_pd(_mm256_cvtps_pd(_mm256_extractf128_ps(va, 1)),
                                     _mm256_cvtps_pd(_mm256_extractf128_ps(vb, 1)));
    acc0 = _mm256_fmadd_pd(d0, d0, acc0);
    acc1 = _mm256_fmadd_pd(d1, d1, acc1);
  }
  return hsum(_mm256_add_pd(acc0, acc1)) +
         squared_distance_f32_scalar(a + i, b + i, n - i);
}

void axpy_f64_avx2(double alpha, const double* x, double* y, size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  size_t i = 0;
  // mul + add rather than fma keeps results identical to the scalar path.
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace taccompress::simd::detail
