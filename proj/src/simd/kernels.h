#pragma once

// Per-ISA kernel tables. Kept free of standard library headers beyond
// the C fixed-width ones so the NEON unit can be syntax-checked
// freestanding.

#include <stddef.h>
#include <stdint.h>

namespace taccompress::simd::detail {

// Mirrors simd::kActivityHigh (checked in dispatch.cc).
inline constexpr unsigned kActivityThreshold = 6;

// Median edge detector on bytes.
inline uint8_t med(uint8_t left, uint8_t up, uint8_t up_left) {
  const uint8_t lo = left < up ? left : up;
  const uint8_t hi = left < up ? up : left;
  if (up_left >= hi) return lo;
  if (up_left <= lo) return hi;
  return static_cast<uint8_t>(left + up - up_left);
}

inline uint8_t activity_bucket(uint8_t left, uint8_t up, uint8_t up_left,
                               unsigned high) {
  const unsigned a = left > up_left ? left - up_left : up_left - left;
  const unsigned b = up > up_left ? up - up_left : up_left - up;
  const unsigned act = a + b;
  return act == 0 ? 0 : (act <= high ? 1 : 2);
}

uint64_t sum_squared_diff_u8_scalar(const uint8_t* a, const uint8_t* b,
                                    size_t n);
void med_residuals_u8_scalar(const uint8_t* cur, const uint8_t* prev, size_t n,
                             size_t stride, uint8_t* residual, uint8_t* bucket);
double dot_f32_scalar(const float* a, const float* b, size_t n);
double squared_distance_f32_scalar(const float* a, const float* b, size_t n);
void axpy_f64_scalar(double alpha, const double* x, double* y, size_t n);

#if defined(__x86_64__) || defined(_M_X64)
uint64_t sum_squared_diff_u8_avx2(const uint8_t* a, const uint8_t* b, size_t n);
void med_residuals_u8_avx2(const uint8_t* cur, const uint8_t* prev, size_t n,
                           size_t stride, uint8_t* residual, uint8_t* bucket);
double dot_f32_avx2(const float* a, const float* b, size_t n);
double squared_distance_f32_avx2(const float* a, const float* b, size_t n);
void axpy_f64_avx2(double alpha, const double* x, double* y, size_t n);
#endif

#if defined(__aarch64__)
uint64_t sum_squared_diff_u8_neon(const uint8_t* a, const uint8_t* b, size_t n);
void med_residuals_u8_neon(const uint8_t* cur, const uint8_t* prev, size_t n,
                           size_t stride, uint8_t* residual, uint8_t* bucket);
double dot_f32_neon(const float* a, const float* b, size_t n);
double squared_distance_f32_neon(const float* a, const float* b, size_t n);
void axpy_f64_neon(double alpha, const double* x, double* y, size_t n);
#endif

}  // namespace taccompress::simd::detail
