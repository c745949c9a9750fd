#include "taccompress/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "taccompress/error.h"
#include "taccompress/simd.h"

namespace taccompress {

double bpss(std::uint64_t compressed_bits, std::uint64_t sub_samples) {
  if (sub_samples == 0) throw DataError("bpss needs a positive sub-sample count");
  return static_cast<double>(compressed_bits) / static_cast<double>(sub_samples);
}

double compression_ratio(double bpss_value) {
  if (!(bpss_value > 0.0)) throw DataError("compression ratio needs bpss > 0");
  return static_cast<double>(kRawBitsPerSubSample) / bpss_value;
}

double bandwidth_bits_per_second(double frames_per_second, std::uint64_t units,
                                 std::uint64_t axes, double bpss_value) {
  return frames_per_second * static_cast<double>(units * axes) * bpss_value;
}

double psnr(const TactileImage& a, const TactileImage& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw DataError("psnr: image dimensions differ");
  }
  const std::uint64_t sse = simd::sum_squared_diff(a.samples(), b.samples());
  if (sse == 0) return kInfinitePsnr;
  const double mse = static_cast<double>(sse) / static_cast<double>(a.sample_count());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

std::string format_metric(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

void RDCurve::normalize() {
  std::sort(points.begin(), points.end(),
            [](const RDPoint& x, const RDPoint& y) { return x.bpss < y.bpss; });
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].bpss > 0.0)) throw DataError("RD point with non-positive rate");
    if (i > 0 && !(points[i].bpss > points[i - 1].bpss)) {
      throw DataError("RD curve " + codec_id + " has repeated rates");
    }
  }
}

}  // namespace taccompress
