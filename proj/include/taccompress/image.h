#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "taccompress/trace.h"

namespace taccompress {

inline constexpr std::size_t kChannels = 3;

// Rest code of each channel: R and G carry offset-binary shear, B the
// normal magnitude.
inline constexpr std::uint8_t kChannelRest[kChannels] = {128, 128, 0};

// 8-bit RGB raster, row-major, channels interleaved, no padding.
// Columns are tactile units, rows are frames.
class TactileImage {
 public:
  TactileImage() = default;
  // Throws DataError on zero dimensions or a size mismatch.
  TactileImage(std::size_t width, std::size_t height,
               std::vector<std::uint8_t> samples);
  // Filled with the rest codes.
  TactileImage(std::size_t width, std::size_t height);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t channels() const { return kChannels; }
  std::size_t row_stride() const { return width_ * kChannels; }
  std::size_t sample_count() const { return samples_.size(); }

  std::span<const std::uint8_t> samples() const { return samples_; }
  std::span<std::uint8_t> mutable_samples() { return samples_; }
  std::span<const std::uint8_t> row(std::size_t r) const {
    return std::span<const std::uint8_t>(samples_).subspan(r * row_stride(),
                                                           row_stride());
  }
  std::uint8_t at(std::size_t r, std::size_t column, std::size_t c) const {
    return samples_[r * row_stride() + column * kChannels + c];
  }

  bool operator==(const TactileImage&) const = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<std::uint8_t> samples_;
};

// Half-open interval of frame indices.
struct FrameRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool operator==(const FrameRange&) const = default;
};

// Columns = units in canonical order, rows = frames, (x, y, z) -> (R, G, B).
// Throws DataError for empty or out-of-bounds ranges.
TactileImage trace_to_image(const GraspTrace& trace,
                            std::optional<FrameRange> range = std::nullopt);

// Inverse of trace_to_image. Throws DataError if the width does not match
// the layout's unit count.
GraspTrace image_to_trace(const TactileImage& image, const SensorLayout& layout,
                          const TraceMetadata& metadata);

inline constexpr std::size_t kDefaultTileHeight = 256;

// Splits [0, frame_count) into consecutive tiles of tile_height frames;
// the last tile holds the remainder.
std::vector<FrameRange> tile_ranges(std::size_t frame_count,
                                    std::size_t tile_height);

// Stacks images of equal width vertically.
TactileImage concat_rows(std::span<const TactileImage> parts);

}  // namespace taccompress
