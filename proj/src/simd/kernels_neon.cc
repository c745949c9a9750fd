// AArch64 Advanced SIMD variants. NEON is part of the AArch64 baseline,
// so no runtime probe is needed.

#include <arm_neon.h>

#include "simd/kernels.h"

namespace taccompress::simd::detail {

uint64_t sum_squared_diff_u8_neon(const uint8_t* a, const uint8_t* b,
                                  size_t n) {
  uint64x2_t total = vdupq_n_u64(0);
  size_t i = 0;
  while (i + 16 <= n) {
    uint32x4_t acc = vdupq_n_u32(0);
    for (int step = 0; step < 4096 && i + 16 <= n; ++step, i += 16) {
      const uint8x16_t d = vabdq_u8(vld1q_u8(a + i), vld1q_u8(b + i));
      const uint16x8_t lo = vmull_u8(vget_low_u8(d), vget_low_u8(d));
      const uint16x8_t hi = vmull_high_u8(d, d);
      acc = vpadalq_u16(acc, lo);
      acc = vpadalq_u16(acc, hi);
    }
    total = vpadalq_u32(total, acc);
  }
  const uint64_t sum = vgetq_lane_u64(total, 0) + vgetq_lane_u64(total, 1);
  return sum + sum_squared_diff_u8_scalar(a + i, b + i, n - i);
}

void med_residuals_u8_neon(const uint8_t* cur, const uint8_t* prev, size_t n,
                           size_t stride, uint8_t* residual, uint8_t* bucket) {
  const uint8x16_t ones = vdupq_n_u8(1);
  const uint8x16_t threshold = vdupq_n_u8(kActivityThreshold);
  size_t i = stride;
  for (; i + 16 <= n; i += 16) {
    const uint8x16_t x = vld1q_u8(cur + i);
    const uint8x16_t l = vld1q_u8(cur + i - stride);
    const uint8x16_t u = vld1q_u8(prev + i);
    const uint8x16_t ul = vld1q_u8(prev + i - stride);

    const uint8x16_t lo = vminq_u8(l, u);
    const uint8x16_t hi = vmaxq_u8(l, u);
    uint8x16_t pred = vsubq_u8(vaddq_u8(l, u), ul);
    pred = vbslq_u8(vcleq_u8(ul, lo), hi, pred);
    pred = vbslq_u8(vcgeq_u8(ul, hi), lo, pred);
    vst1q_u8(residual + i, vsubq_u8(x, pred));

    const uint8x16_t act = vqaddq_u8(vabdq_u8(l, ul), vabdq_u8(u, ul));
    const uint8x16_t nonzero = vandq_u8(vtstq_u8(act, act), ones);
    const uint8x16_t high = vandq_u8(vcgtq_u8(act, threshold), ones);
    vst1q_u8(bucket + i, vaddq_u8(nonzero, high));
  }
  for (; i < n; ++i) {
    const uint8_t l = cur[i - stride];
    const uint8_t u = prev[i];
    const uint8_t ul = prev[i - stride];
    residual[i] = static_cast<uint8_t>(cur[i] - med(l, u, ul));
    bucket[i] = activity_bucket(l, u, ul, kActivityThreshold);
  }
}

double dot_f32_neon(const float* a, const float* b, size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float32x4_t va = vld1q_f32(a + i);
    const float32x4_t vb = vld1q_f32(b + i);
    acc0 = vfmaq_f64(acc0, vcvt_f64_f32(vget_low_f32(va)),
                     vcvt_f64_f32(vget_low_f32(vb)));
    acc1 = vfmaq_f64(acc1, vcvt_high_f64_f32(va), vcvt_high_f64_f32(vb));
  }
  return vaddvq_f64(vaddq_f64(acc0, acc1)) + dot_f32_scalar(a + i, b + i, n - i);
}

double squared_distance_f32_neon(const float* a, const float* b, size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float32x4_t va = vld1q_f32(a + i);
    const float32x4_t vb = vld1q_f32(b + i);
    const float64x2_t d0 = vsubq_f64(vcvt_f64_f32(vget_low_f32(va)),
                                     vcvt_f64_f32(vget_low_f32(vb)));
    const float64x2_t d1 = vsubq_f64(vcvt_high_f64_f32(va), vcvt_high_f64_f32(vb));
    acc0 = vfmaq_f64(acc0, d0, d0);
    acc1 = vfmaq_f64(acc1, d1, d1);
  }
  return vaddvq_f64(vaddq_f64(acc0, acc1)) +
         squared_distance_f32_scalar(a + i, b + i, n - i);
}

void axpy_f64_neon(double alpha, const double* x, double* y, size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace taccompress::simd::detail
