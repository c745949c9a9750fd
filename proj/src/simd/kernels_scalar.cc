#include "simd/kernels.h"

namespace taccompress::simd::detail {

uint64_t sum_squared_diff_u8_scalar(const uint8_t* a, const uint8_t* b,
                                    size_t n) {
  uint64_t sum = 0;
  for (size_t i = 0; i < n; ++i) {
    const int d = static_cast<int>(a[i]) - static_cast<int>(b[i]);
    sum += static_cast<uint64_t>(d * d);
  }
  return sum;
}

void med_residuals_u8_scalar(const uint8_t* cur, const uint8_t* prev, size_t n,
                             size_t stride, uint8_t* residual,
                             uint8_t* bucket) {
  for (size_t i = stride; i < n; ++i) {
    const uint8_t left = cur[i - stride];
    const uint8_t up = prev[i];
    const uint8_t up_left = prev[i - stride];
    residual[i] = static_cast<uint8_t>(cur[i] - med(left, up, up_left));
    bucket[i] = activity_bucket(left, up, up_left, kActivityThreshold);
  }
}

double dot_f32_scalar(const float* a, const float* b, size_t n) {
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return sum;
}

double squared_distance_f32_scalar(const float* a, const float* b, size_t n) {
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    sum += d * d;
  }
  return sum;
}

void axpy_f64_scalar(double alpha, const double* x, double* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace taccompress::simd::detail
