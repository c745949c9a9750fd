#include <doctest.h>

#include <cmath>
#include <random>

#include "taccompress/error.h"
#include "taccompress/metrics.h"

using namespace taccompress;

namespace {

TactileImage constant(std::size_t w, std::size_t h, std::uint8_t v) {
  return TactileImage(w, h, std::vector<std::uint8_t>(w * h * 3, v));
}

TactileImage noisy(std::size_t w, std::size_t h, std::uint64_t seed, int amplitude,
                   const TactileImage* base = nullptr) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> v(w * h * 3);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const int b = base ? base->samples()[i] : static_cast<int>(rng() % 256);
    const int d = amplitude ? static_cast<int>(rng() % (2 * amplitude + 1)) - amplitude : 0;
    v[i] = static_cast<std::uint8_t>(std::clamp(b + d, 0, 255));
  }
  return TactileImage(w, h, std::move(v));
}

double reference_psnr(const TactileImage& a, const TactileImage& b) {
  double sse = 0.0;
  for (std::size_t i = 0; i < a.sample_count(); ++i) {
    const double d = double(a.samples()[i]) - double(b.samples()[i]);
    sse += d * d;
  }
  const double mse = sse / static_cast<double>(a.sample_count());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

RDCurve curve(std::string id, std::vector<std::pair<double, double>> rate_psnr) {
  RDCurve c{std::move(id), {}};
  for (auto [r, q] : rate_psnr) c.points.push_back({r, q, 0.9 + q / 1000.0});
  return c;
}

RDCurve scaled(const RDCurve& c, double factor) {
  RDCurve out = c;
  for (auto& p : out.points) p.bpss *= factor;
  return out;
}

const RDCurve kRef = curve("ref", {{0.05, 30.0}, {0.1, 34.0}, {0.2, 37.5}, {0.4, 40.0}, {0.8, 43.0}});

}  // namespace

TEST_CASE("bpss, compression ratio and bandwidth") {
  CHECK(bpss(12456, 342000) == doctest::Approx(0.0364210526).epsilon(1e-9));
  CHECK(bpss(8 * 1000, 1000) == 8.0);
  CHECK(compression_ratio(8.0) == 1.0);
  CHECK(compression_ratio(0.0364) == doctest::Approx(219.78).epsilon(1e-3));
  CHECK(bandwidth_bits_per_second(100, 1140, 3, 8.0) == 2736000.0);
  CHECK(bandwidth_bits_per_second(100, 1140, 3, 0.0364) == doctest::Approx(12448.8).epsilon(1e-9));
  CHECK_THROWS_AS(bpss(1, 0), DataError);
}

TEST_CASE("PSNR oracles") {
  const TactileImage a = noisy(13, 7, 1, 0);
  CHECK(std::isinf(psnr(a, a)));
  CHECK(psnr(constant(4, 4, 0), constant(4, 4, 255)) == 0.0);

  const TactileImage x(2, 1, {10, 20, 30, 40, 50, 60});
  const TactileImage y(2, 1, {10, 20, 46, 40, 50, 60});
  const double expected = 10.0 * std::log10(65025.0 * 6.0 / 256.0);
  CHECK(expected == doctest::Approx(31.83).epsilon(1e-3));
  CHECK(psnr(x, y) == doctest::Approx(expected).epsilon(1e-12));

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const TactileImage p = noisy(31, 9, seed, 0);
    const TactileImage q = noisy(31, 9, seed + 100, 1 + static_cast<int>(seed), &p);
    if (p == q) continue;
    REQUIRE(psnr(p, q) == doctest::Approx(reference_psnr(p, q)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(psnr(constant(2, 2, 0), constant(2, 3, 0)), DataError);
}

TEST_CASE("MS-SSIM scale count") {
  CHECK(ms_ssim_scales(176) == 5);
  CHECK(ms_ssim_scales(175) == 4);
  CHECK(ms_ssim_scales(22) == 2);
  CHECK(ms_ssim_scales(11) == 1);
  CHECK(ms_ssim_scales(10) == 0);
}

TEST_CASE("MS-SSIM identity and symmetry") {
  const TactileImage a = noisy(180, 180, 3, 0);
  CHECK(ms_ssim(a, a) == doctest::Approx(1.0).epsilon(1e-9));
  const TactileImage b = noisy(180, 180, 4, 20, &a);
  CHECK(std::abs(ms_ssim(a, b) - ms_ssim(b, a)) < 1e-12);
  CHECK(ms_ssim(a, b) < 1.0);
  const TactileImage small = noisy(5, 3, 5, 0);
  CHECK(ms_ssim(small, small) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("MS-SSIM of constant images matches the closed form") {
  // Zero variance leaves only the luminance term at the coarsest scale:
  // l = (2ab + C1) / (a^2 + b^2 + C1), raised to its normalized weight.
  const double c1 = std::pow(0.01 * 255.0, 2);
  const double w = kMsSsimWeights[2] / (kMsSsimWeights[0] + kMsSsimWeights[1] + kMsSsimWeights[2]);
  double previous = 1.0;
  for (int gap : {8, 64}) {
    const double a = 100.0, b = 100.0 + gap;
    const double l = (2 * a * b + c1) / (a * a + b * b + c1);
    const double got = ms_ssim(constant(64, 64, 100), constant(64, 64, static_cast<std::uint8_t>(b)));
    CHECK(got == doctest::Approx(std::pow(l, w)).epsilon(1e-12));
    CHECK(got < previous);
    previous = got;
  }
}

TEST_CASE("BD-rate oracles") {
  CHECK(std::abs(bd_rate(kRef, kRef, QualityMetric::kPsnr)) < 1e-9);
  CHECK(std::abs(bd_rate(kRef, kRef, QualityMetric::kMsSsim)) < 1e-9);
  CHECK(bd_rate(kRef, scaled(kRef, 2.0), QualityMetric::kPsnr) == doctest::Approx(100.0).epsilon(1e-3));
  CHECK(bd_rate(kRef, scaled(kRef, 0.5), QualityMetric::kPsnr) == doctest::Approx(-50.0).epsilon(1e-3));
  CHECK(bd_rate(kRef, scaled(kRef, 2.0), QualityMetric::kMsSsim) == doctest::Approx(100.0).epsilon(1e-3));
}

TEST_CASE("BD-rate property: swapping curves inverts the ratio") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const double f = std::exp(std::uniform_real_distribution<double>(-1.0, 1.0)(rng));
    const RDCurve t = scaled(kRef, f);
    const double ab = bd_rate(kRef, t, QualityMetric::kPsnr) / 100.0 + 1.0;
    const double ba = bd_rate(t, kRef, QualityMetric::kPsnr) / 100.0 + 1.0;
    REQUIRE(ab * ba == doctest::Approx(1.0).epsilon(1e-9));
    REQUIRE(ab == doctest::Approx(f).epsilon(1e-9));
  }
}

TEST_CASE("BD-rate preconditions") {
  const RDCurve three = curve("c", {{0.1, 30}, {0.2, 33}, {0.4, 36}});
  CHECK_THROWS_AS(bd_rate(three, kRef, QualityMetric::kPsnr), DataError);

  RDCurve with_inf = kRef;
  with_inf.points.push_back({1.6, kInfinitePsnr, 1.0});
  CHECK(std::abs(bd_rate(kRef, with_inf, QualityMetric::kPsnr)) < 1e-9);

  const RDCurve far = curve("far", {{0.1, 50}, {0.2, 52}, {0.4, 54}, {0.8, 56}});
  CHECK_THROWS_AS(bd_rate(kRef, far, QualityMetric::kPsnr), DataError);

  const RDCurve bent = curve("bent", {{0.1, 30}, {0.2, 35}, {0.4, 33}, {0.8, 40}});
  CHECK_THROWS_AS(bd_rate(kRef, bent, QualityMetric::kPsnr), DataError);

  const RDCurve tie = curve("tie", {{0.1, 30}, {0.1, 35}, {0.4, 38}, {0.8, 40}});
  CHECK_THROWS_AS(bd_rate(kRef, tie, QualityMetric::kPsnr), DataError);
}

TEST_CASE("metric formatting") {
  CHECK(format_metric(kInfinitePsnr) == "inf");
  CHECK(format_metric(0.036421052631) == "0.0364211");
  CHECK(format_metric(8.0) == "8");
}
