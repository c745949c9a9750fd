#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "taccompress/layout.h"

namespace taccompress {

// One 3-axis reading. Tangential axes are offset-binary (128 = no shear),
// the normal axis is a magnitude starting at 0.
struct ForceSample {
  std::uint8_t x = 128;
  std::uint8_t y = 128;
  std::uint8_t z = 0;

  bool operator==(const ForceSample&) const = default;
};
static_assert(sizeof(ForceSample) == 3);

inline constexpr ForceSample kRestSample{128, 128, 0};
inline constexpr std::size_t kAxes = 3;
inline constexpr unsigned kRawBitsPerSubSample = 8;

enum class Pose : std::uint8_t {
  kPinch = 0,
  kTripod = 1,
  kCylindrical = 2,
  kSpherical = 3,
};

inline constexpr Pose kAllPoses[] = {Pose::kPinch, Pose::kTripod,
                                     Pose::kCylindrical, Pose::kSpherical};

std::string_view pose_name(Pose pose);
std::optional<Pose> parse_pose(std::string_view name);

// Sample rate with millihertz resolution, which is what MPTD stores.
class SampleRate {
 public:
  constexpr SampleRate() = default;
  static constexpr SampleRate from_millihertz(std::uint32_t mhz) {
    SampleRate r;
    r.millihertz_ = mhz;
    return r;
  }
  // Throws DataError for non-positive or unrepresentable rates.
  static SampleRate from_hz(double hz);

  constexpr std::uint32_t millihertz() const { return millihertz_; }
  constexpr double hz() const { return millihertz_ / 1000.0; }

  bool operator==(const SampleRate&) const = default;

 private:
  std::uint32_t millihertz_ = 100'000;
};

struct TraceMetadata {
  SampleRate sample_rate;
  std::string object_label;
  Pose pose = Pose::kPinch;
  std::uint16_t repetition_id = 0;

  bool operator==(const TraceMetadata&) const = default;
};

// A sequence of full-hand frames. Frames are stored back to back, each
// frame holding layout().total_units() samples in canonical unit order.
class GraspTrace {
 public:
  // Throws DataError if samples.size() is not a multiple of the unit count.
  GraspTrace(SensorLayout layout, TraceMetadata metadata,
             std::vector<ForceSample> samples);

  const SensorLayout& layout() const { return layout_; }
  const TraceMetadata& metadata() const { return metadata_; }
  std::size_t frame_count() const { return frame_count_; }
  std::size_t units() const { return layout_.total_units(); }

  std::span<const ForceSample> frame(std::size_t t) const;
  std::span<const ForceSample> samples() const { return samples_; }

  // frame_count * total_units * 3, the denominator of bpss.
  std::uint64_t sub_sample_count() const {
    return static_cast<std::uint64_t>(frame_count_) * units() * kAxes;
  }

  bool operator==(const GraspTrace& other) const = default;

 private:
  SensorLayout layout_;
  TraceMetadata metadata_;
  std::vector<ForceSample> samples_;
  std::size_t frame_count_ = 0;
};

}  // namespace taccompress
