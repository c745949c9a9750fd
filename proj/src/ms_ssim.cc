#include <algorithm>
#include <cmath>
#include <vector>

#include "taccompress/error.h"
#include "taccompress/metrics.h"
#include "taccompress/simd.h"

namespace taccompress {
namespace {

struct Plane {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> v;
};

Plane extract_channel(const TactileImage& image, std::size_t channel) {
  Plane p{image.width(), image.height(), {}};
  p.v.resize(p.width * p.height);
  const auto samples = image.samples();
  for (std::size_t i = 0; i < p.v.size(); ++i) p.v[i] = samples[i * kChannels + channel];
  return p;
}

Plane multiply(const Plane& a, const Plane& b) {
  Plane out{a.width, a.height, std::vector<double>(a.v.size())};
  for (std::size_t i = 0; i < a.v.size(); ++i) out.v[i] = a.v[i] * b.v[i];
  return out;
}

Plane downsample(const Plane& p) {
  Plane out{p.width / 2, p.height / 2, {}};
  out.v.resize(out.width * out.height);
  for (std::size_t y = 0; y < out.height; ++y) {
    const double* r0 = &p.v[(2 * y) * p.width];
    const double* r1 = r0 + p.width;
    for (std::size_t x = 0; x < out.width; ++x) {
      out.v[y * out.width + x] = 0.25 * (r0[2 * x] + r0[2 * x + 1] + r1[2 * x] + r1[2 * x + 1]);
    }
  }
  return out;
}

std::vector<double> gaussian_kernel(int size, double sigma) {
  std::vector<double> k(static_cast<std::size_t>(size));
  const double center = (size - 1) / 2.0;
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - center;
    k[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * sigma * sigma));
    sum += k[static_cast<std::size_t>(i)];
  }
  for (double& x : k) x /= sum;
  return k;
}

// Separable "valid" filtering: the output covers only positions where
// the whole window fits.
Plane filter_valid(const Plane& in, const std::vector<double>& kernel) {
  const std::size_t taps = kernel.size();
  const std::size_t ow = in.width - taps + 1;
  const std::size_t oh = in.height - taps + 1;
  std::vector<double> tmp(ow * in.height, 0.0);
  for (std::size_t y = 0; y < in.height; ++y) {
    double* dst = &tmp[y * ow];
    for (std::size_t k = 0; k < taps; ++k) {
      simd::axpy(kernel[k], std::span<const double>(&in.v[y * in.width + k], ow),
                 std::span<double>(dst, ow));
    }
  }
  Plane out{ow, oh, std::vector<double>(ow * oh, 0.0)};
  for (std::size_t y = 0; y < oh; ++y) {
    double* dst = &out.v[y * ow];
    for (std::size_t k = 0; k < taps; ++k) {
      simd::axpy(kernel[k], std::span<const double>(&tmp[(y + k) * ow], ow),
                 std::span<double>(dst, ow));
    }
  }
  return out;
}

struct ScaleTerms {
  double luminance_cs;  // mean of l * cs, the SSIM map
  double cs;            // mean of cs
};

ScaleTerms scale_terms(const Plane& a, const Plane& b,
                       const std::vector<double>& kernel, double c1, double c2) {
  const Plane mu1 = filter_valid(a, kernel);
  const Plane mu2 = filter_valid(b, kernel);
  const Plane e11 = filter_valid(multiply(a, a), kernel);
  const Plane e22 = filter_valid(multiply(b, b), kernel);
  const Plane e12 = filter_valid(multiply(a, b), kernel);
  double sum_ssim = 0.0;
  double sum_cs = 0.0;
  const std::size_t n = mu1.v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double m1 = mu1.v[i];
    const double m2 = mu2.v[i];
    const double s11 = e11.v[i] - m1 * m1;
    const double s22 = e22.v[i] - m2 * m2;
    const double s12 = e12.v[i] - m1 * m2;
    const double cs = (2.0 * s12 + c2) / (s11 + s22 + c2);
    const double l = (2.0 * m1 * m2 + c1) / (m1 * m1 + m2 * m2 + c1);
    sum_ssim += l * cs;
    sum_cs += cs;
  }
  return {sum_ssim / n, sum_cs / n};
}

// Whole-image statistics for inputs smaller than the window.
double global_ssim(const Plane& a, const Plane& b, double c1, double c2) {
  const double n = static_cast<double>(a.v.size());
  double m1 = 0, m2 = 0;
  for (std::size_t i = 0; i < a.v.size(); ++i) {
    m1 += a.v[i];
    m2 += b.v[i];
  }
  m1 /= n;
  m2 /= n;
  double s11 = 0, s22 = 0, s12 = 0;
  for (std::size_t i = 0; i < a.v.size(); ++i) {
    const double d1 = a.v[i] - m1;
    const double d2 = b.v[i] - m2;
    s11 += d1 * d1;
    s22 += d2 * d2;
    s12 += d1 * d2;
  }
  s11 /= n;
  s22 /= n;
  s12 /= n;
  const double cs = (2.0 * s12 + c2) / (s11 + s22 + c2);
  const double l = (2.0 * m1 * m2 + c1) / (m1 * m1 + m2 * m2 + c1);
  return std::clamp(l * cs, 0.0, 1.0);
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

int ms_ssim_scales(std::size_t min_dim, int window) {
  int scales = 0;
  std::size_t d = min_dim;
  while (scales < 5 && d >= static_cast<std::size_t>(window)) {
    ++scales;
    d /= 2;
  }
  return scales;
}

double ms_ssim(const TactileImage& a, const TactileImage& b,
               const MsSsimOptions& options) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw DataError("ms_ssim: image dimensions differ");
  }
  const double c1 = std::pow(options.k1 * 255.0, 2);
  const double c2 = std::pow(options.k2 * 255.0, 2);
  const int scales = ms_ssim_scales(std::min(a.width(), a.height()), options.window);
  const auto kernel = gaussian_kernel(options.window, options.sigma);

  double weight_sum = 0.0;
  for (int j = 0; j < scales; ++j) weight_sum += kMsSsimWeights[j];

  double total = 0.0;
  for (std::size_t c = 0; c < kChannels; ++c) {
    Plane pa = extract_channel(a, c);
    Plane pb = extract_channel(b, c);
    if (scales == 0) {
      total += global_ssim(pa, pb, c1, c2);
      continue;
    }
    double value = 1.0;
    for (int j = 0; j < scales; ++j) {
      const ScaleTerms t = scale_terms(pa, pb, kernel, c1, c2);
      const double w = kMsSsimWeights[j] / weight_sum;
      const bool last = j + 1 == scales;
      value *= std::pow(clamp01(last ? t.luminance_cs : t.cs), w);
      if (!last) {
        pa = downsample(pa);
        pb = downsample(pb);
      }
    }
    total += value;
  }
  return clamp01(total / kChannels);
}

}  // namespace taccompress
