#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference version;
// AVX2 (x86-64) and NEON (AArch64) variants are compiled when the target
// allows and picked at runtime. Setting TACCOMPRESS_SIMD=scalar in the
// environment forces the reference kernels.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace taccompress::simd {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view isa_name(Isa isa);

struct Kernels {
  Isa isa;

  // sum over i of (a[i] - b[i])^2
  std::uint64_t (*sum_squared_diff_u8)(const std::uint8_t* a,
                                       const std::uint8_t* b, std::size_t n);

  // Interior of one raster row for the median-edge-detector predictor.
  // For i in [stride, n): left = cur[i-stride], up = prev[i],
  // up_left = prev[i-stride]; residual[i] = cur[i] - med(left, up, up_left)
  // modulo 256 and bucket[i] = activity bucket of |left-up_left| +
  // |up-up_left| (0 when zero, 1 when <= kActivityHigh, else 2).
  // Entries below stride are left untouched.
  void (*med_residuals_u8)(const std::uint8_t* cur, const std::uint8_t* prev,
                           std::size_t n, std::size_t stride,
                           std::uint8_t* residual, std::uint8_t* bucket);

  // Float inputs, double accumulation.
  double (*dot_f32)(const float* a, const float* b, std::size_t n);
  double (*squared_distance_f32)(const float* a, const float* b,
                                 std::size_t n);

  // y[i] += alpha * x[i]
  void (*axpy_f64)(double alpha, const double* x, double* y, std::size_t n);
};

inline constexpr unsigned kActivityHigh = 6;

// Kernels chosen for this process (best supported ISA unless overridden).
const Kernels& active();

// Kernels for a specific ISA, or nullptr when not compiled in or not
// supported by the running CPU.
const Kernels* kernels_for(Isa isa);

std::vector<Isa> available_isas();

// Span conveniences over active().
std::uint64_t sum_squared_diff(std::span<const std::uint8_t> a,
                               std::span<const std::uint8_t> b);
double dot(std::span<const float> a, std::span<const float> b);
double squared_distance(std::span<const float> a, std::span<const float> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);

}  // namespace taccompress::simd
