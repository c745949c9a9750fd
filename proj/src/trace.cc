#include "taccompress/trace.h"

#include <cmath>
#include <limits>

#include "taccompress/error.h"

namespace taccompress {

std::string_view pose_name(Pose pose) {
  switch (pose) {
    case Pose::kPinch:
      return "pinch";
    case Pose::kTripod:
      return "tripod";
    case Pose::kCylindrical:
      return "cylindrical";
    case Pose::kSpherical:
      return "spherical";
  }
  return "unknown";
}

std::optional<Pose> parse_pose(std::string_view name) {
  for (Pose pose : kAllPoses) {
    if (pose_name(pose) == name) return pose;
  }
  return std::nullopt;
}

SampleRate SampleRate::from_hz(double hz) {
  const double mhz = std::round(hz * 1000.0);
  if (!(mhz >= 1.0) ||
      mhz > static_cast<double>(std::numeric_limits<std::uint32_t>::max())) {
    throw DataError("sample rate must be positive and below 4.29 MHz");
  }
  return from_millihertz(static_cast<std::uint32_t>(mhz));
}

GraspTrace::GraspTrace(SensorLayout layout, TraceMetadata metadata,
                       std::vector<ForceSample> samples)
    : layout_(std::move(layout)),
      metadata_(std::move(metadata)),
      samples_(std::move(samples)) {
  const std::size_t units = layout_.total_units();
  if (samples_.size() % units != 0) {
    throw DataError("sample count is not a whole number of frames");
  }
  frame_count_ = samples_.size() / units;
}

std::span<const ForceSample> GraspTrace::frame(std::size_t t) const {
  if (t >= frame_count_) throw DataError("frame index out of range");
  const std::size_t units = layout_.total_units();
  return std::span<const ForceSample>(samples_).subspan(t * units, units);
}

}  // namespace taccompress
