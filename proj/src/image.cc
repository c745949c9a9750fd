#include "taccompress/image.h"

#include <cstring>
#include <string>

#include "taccompress/error.h"

namespace taccompress {

TactileImage::TactileImage(std::size_t width, std::size_t height,
                           std::vector<std::uint8_t> samples)
    : width_(width), height_(height), samples_(std::move(samples)) {
  if (width_ == 0 || height_ == 0) {
    throw DataError("image dimensions must be positive");
  }
  if (samples_.size() != width_ * height_ * kChannels) {
    throw DataError("image sample count does not match " +
                    std::to_string(width_) + "x" + std::to_string(height_) +
                    "x3");
  }
}

TactileImage::TactileImage(std::size_t width, std::size_t height)
    : width_(width), height_(height) {
  if (width_ == 0 || height_ == 0) {
    throw DataError("image dimensions must be positive");
  }
  samples_.resize(width_ * height_ * kChannels);
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    samples_[i] = kChannelRest[i % kChannels];
  }
}

TactileImage trace_to_image(const GraspTrace& trace,
                            std::optional<FrameRange> range) {
  const FrameRange r = range.value_or(FrameRange{0, trace.frame_count()});
  if (r.end <= r.begin) throw DataError("empty frame range");
  if (r.end > trace.frame_count()) throw DataError("frame range out of bounds");
  const std::size_t units = trace.units();
  const auto samples = trace.samples().subspan(r.begin * units, r.size() * units);
  std::vector<std::uint8_t> raster(samples.size_bytes());
  std::memcpy(raster.data(), samples.data(), raster.size());
  return TactileImage(units, r.size(), std::move(raster));
}

GraspTrace image_to_trace(const TactileImage& image, const SensorLayout& layout,
                          const TraceMetadata& metadata) {
  if (image.width() != layout.total_units()) {
    throw DataError("image width " + std::to_string(image.width()) +
                    " does not match layout unit count " +
                    std::to_string(layout.total_units()));
  }
  std::vector<ForceSample> samples(image.width() * image.height());
  std::memcpy(samples.data(), image.samples().data(), image.sample_count());
  return GraspTrace(layout, metadata, std::move(samples));
}

std::vector<FrameRange> tile_ranges(std::size_t frame_count,
                                    std::size_t tile_height) {
  if (tile_height == 0) throw DataError("tile height must be positive");
  std::vector<FrameRange> tiles;
  for (std::size_t begin = 0; begin < frame_count; begin += tile_height) {
    tiles.push_back({begin, std::min(frame_count, begin + tile_height)});
  }
  return tiles;
}

TactileImage concat_rows(std::span<const TactileImage> parts) {
  if (parts.empty()) throw DataError("nothing to concatenate");
  const std::size_t width = parts.front().width();
  std::size_t height = 0;
  for (const auto& p : parts) {
    if (p.width() != width) throw DataError("tile widths differ");
    height += p.height();
  }
  std::vector<std::uint8_t> raster;
  raster.reserve(width * height * kChannels);
  for (const auto& p : parts) {
    raster.insert(raster.end(), p.samples().begin(), p.samples().end());
  }
  return TactileImage(width, height, std::move(raster));
}

}  // namespace taccompress
