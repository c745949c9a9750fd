#include <doctest.h>

#include <cstdlib>
#include <random>

#include "taccompress/simd.h"

using namespace taccompress;

namespace {

template <typename T>
std::vector<T> random_values(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<T> v(n);
  for (auto& x : v) {
    if constexpr (std::is_same_v<T, std::uint8_t>) {
      x = static_cast<std::uint8_t>(rng());
    } else {
      x = static_cast<T>(std::uniform_real_distribution<double>(-2.0, 2.0)(rng));
    }
  }
  return v;
}

// Rows with long runs so that every activity bucket occurs.
std::vector<std::uint8_t> smooth_row(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> v(n);
  int level = 128;
  for (auto& x : v) {
    if (rng() % 5 == 0) level += static_cast<int>(rng() % 21) - 10;
    level = std::clamp(level, 0, 255);
    x = static_cast<std::uint8_t>(level);
  }
  return v;
}

}  // namespace

TEST_CASE("scalar kernels are always available") {
  REQUIRE(simd::kernels_for(simd::Isa::kScalar) != nullptr);
  CHECK(simd::available_isas().front() == simd::Isa::kScalar);
}

TEST_CASE("every compiled ISA matches the scalar reference") {
  const simd::Kernels& ref = *simd::kernels_for(simd::Isa::kScalar);
  for (simd::Isa isa : simd::available_isas()) {
    const simd::Kernels& k = *simd::kernels_for(isa);
    CAPTURE(simd::isa_name(isa));
    for (std::size_t n : {0, 1, 3, 7, 15, 16, 17, 31, 32, 33, 63, 64, 65, 100, 1000, 3420}) {
      CAPTURE(n);
      const auto a8 = random_values<std::uint8_t>(n, n + 1);
      const auto b8 = random_values<std::uint8_t>(n, n + 2);
      CHECK(k.sum_squared_diff_u8(a8.data(), b8.data(), n) ==
            ref.sum_squared_diff_u8(a8.data(), b8.data(), n));

      const auto af = random_values<float>(n, n + 3);
      const auto bf = random_values<float>(n, n + 4);
      CHECK(k.dot_f32(af.data(), bf.data(), n) ==
            doctest::Approx(ref.dot_f32(af.data(), bf.data(), n)).epsilon(1e-12));
      CHECK(k.squared_distance_f32(af.data(), bf.data(), n) ==
            doctest::Approx(ref.squared_distance_f32(af.data(), bf.data(), n)).epsilon(1e-12));

      const auto x = random_values<double>(n, n + 5);
      auto y1 = random_values<double>(n, n + 6);
      auto y2 = y1;
      k.axpy_f64(0.37, x.data(), y1.data(), n);
      ref.axpy_f64(0.37, x.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) REQUIRE(y1[i] == doctest::Approx(y2[i]).epsilon(1e-15));

      for (std::size_t stride : {1, 3}) {
        if (n <= stride) continue;
        for (int variant = 0; variant < 2; ++variant) {
          const auto cur = variant ? smooth_row(n, n + 7) : random_values<std::uint8_t>(n, n + 7);
          const auto prev = variant ? smooth_row(n, n + 8) : random_values<std::uint8_t>(n, n + 8);
          std::vector<std::uint8_t> r1(n, 7), r2(n, 7), b1(n, 9), b2(n, 9);
          k.med_residuals_u8(cur.data(), prev.data(), n, stride, r1.data(), b1.data());
          ref.med_residuals_u8(cur.data(), prev.data(), n, stride, r2.data(), b2.data());
          REQUIRE(r1 == r2);
          REQUIRE(b1 == b2);
        }
      }
    }
  }
}

TEST_CASE("sum of squared differences oracle") {
  const std::vector<std::uint8_t> a = {0, 255, 10, 20};
  const std::vector<std::uint8_t> b = {255, 0, 10, 24};
  CHECK(simd::sum_squared_diff(a, b) == 2u * 65025u + 16u);
}
