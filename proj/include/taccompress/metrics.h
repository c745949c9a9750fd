#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "taccompress/image.h"

namespace taccompress {

// Bits per sub-sample. Throws DataError when sub_samples is zero.
double bpss(std::uint64_t compressed_bits, std::uint64_t sub_samples);

// Raw bits (8 per sub-sample) over compressed bits: 8.0 / bpss.
double compression_ratio(double bpss_value);

// Bit rate of a stream of frames at `frames_per_second`, each frame
// carrying units * axes sub-samples coded at `bpss_value`.
double bandwidth_bits_per_second(double frames_per_second, std::uint64_t units,
                                 std::uint64_t axes, double bpss_value);

inline constexpr double kInfinitePsnr = std::numeric_limits<double>::infinity();

// 10 log10(255^2 / MSE) over every sample; +inf for identical images.
double psnr(const TactileImage& a, const TactileImage& b);

struct MsSsimOptions {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
};

inline constexpr double kMsSsimWeights[5] = {0.0448, 0.2856, 0.3001, 0.2363,
                                             0.1333};

// Number of scales used for a min(width, height) of `min_dim`: the
// largest count (at most 5) whose coarsest scale is still at least one
// window wide after 2x2 downsamplings that drop odd edges.
int ms_ssim_scales(std::size_t min_dim, int window = 11);

// Multi-scale SSIM, per channel then averaged over channels. With fewer
// than five scales the leading weights are renormalized to sum to one;
// images narrower than the window use whole-image statistics at a
// single scale. Per-scale terms are clamped to [0, 1].
double ms_ssim(const TactileImage& a, const TactileImage& b,
               const MsSsimOptions& options = {});

enum class QualityMetric { kPsnr, kMsSsim };

struct RDPoint {
  double bpss = 0.0;
  double psnr_db = 0.0;  // may be kInfinitePsnr
  double ms_ssim = 0.0;

  double quality(QualityMetric metric) const {
    return metric == QualityMetric::kPsnr ? psnr_db : ms_ssim;
  }
};

struct RDCurve {
  std::string codec_id;
  std::vector<RDPoint> points;

  // Sorts points by rate; throws DataError unless rates are strictly
  // increasing afterwards.
  void normalize();
};

// Bjontegaard delta rate in percent (negative = test needs fewer bits).
// Each curve is fitted with a cubic least-squares polynomial of
// log10(rate) against quality; the fits are integrated over the shared
// quality interval. Points with infinite quality are dropped first.
// Throws DataError with fewer than 4 usable points, no quality overlap,
// or a curve whose quality does not rise strictly with rate.
double bd_rate(const RDCurve& reference, const RDCurve& test,
               QualityMetric metric);

// 6 significant digits, "inf" for infinities.
std::string format_metric(double value);

}  // namespace taccompress
