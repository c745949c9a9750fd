#include <cstdlib>
#include <string>

#include "simd/kernels.h"
#include "taccompress/error.h"
#include "taccompress/simd.h"

namespace taccompress::simd {

static_assert(kActivityHigh == detail::kActivityThreshold);

namespace {

constexpr Kernels kScalar{
    Isa::kScalar,
    detail::sum_squared_diff_u8_scalar,
    detail::med_residuals_u8_scalar,
    detail::dot_f32_scalar,
    detail::squared_distance_f32_scalar,
    detail::axpy_f64_scalar,
};

#if defined(TACCOMPRESS_HAVE_AVX2)
constexpr Kernels kAvx2{
    Isa::kAvx2,
    detail::sum_squared_diff_u8_avx2,
    detail::med_residuals_u8_avx2,
    detail::dot_f32_avx2,
    detail::squared_distance_f32_avx2,
    detail::axpy_f64_avx2,
};
#endif

#if defined(TACCOMPRESS_HAVE_NEON)
constexpr Kernels kNeon{
    Isa::kNeon,
    detail::sum_squared_diff_u8_neon,
    detail::med_residuals_u8_neon,
    detail::dot_f32_neon,
    detail::squared_distance_f32_neon,
    detail::axpy_f64_neon,
};
#endif

const Kernels& select() {
  if (const char* forced = std::getenv("TACCOMPRESS_SIMD")) {
    const std::string name(forced);
    for (Isa isa : {Isa::kScalar, Isa::kAvx2, Isa::kNeon}) {
      if (name == isa_name(isa)) {
        if (const Kernels* k = kernels_for(isa)) return *k;
      }
    }
  }
  for (Isa isa : {Isa::kAvx2, Isa::kNeon}) {
    if (const Kernels* k = kernels_for(isa)) return *k;
  }
  return kScalar;
}

void check_sizes(std::size_t a, std::size_t b) {
  if (a != b) throw DataError("kernel operands differ in length");
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kNeon:
      return "neon";
  }
  return "unknown";
}

const Kernels* kernels_for(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return &kScalar;
    case Isa::kAvx2:
#if defined(TACCOMPRESS_HAVE_AVX2)
      if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
        return &kAvx2;
      }
#endif
      return nullptr;
    case Isa::kNeon:
#if defined(TACCOMPRESS_HAVE_NEON)
      return &kNeon;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::kScalar, Isa::kAvx2, Isa::kNeon}) {
    if (kernels_for(isa)) out.push_back(isa);
  }
  return out;
}

const Kernels& active() {
  static const Kernels& chosen = select();
  return chosen;
}

std::uint64_t sum_squared_diff(std::span<const std::uint8_t> a,
                               std::span<const std::uint8_t> b) {
  check_sizes(a.size(), b.size());
  return active().sum_squared_diff_u8(a.data(), b.data(), a.size());
}

double dot(std::span<const float> a, std::span<const float> b) {
  check_sizes(a.size(), b.size());
  return active().dot_f32(a.data(), b.data(), a.size());
}

double squared_distance(std::span<const float> a, std::span<const float> b) {
  check_sizes(a.size(), b.size());
  return active().squared_distance_f32(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  check_sizes(x.size(), y.size());
  active().axpy_f64(alpha, x.data(), y.data(), x.size());
}

}  // namespace taccompress::simd
