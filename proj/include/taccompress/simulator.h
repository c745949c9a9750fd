#pragma once

// Synthetic grasp traces. A trace walks through five phases: pre-grasp
// idle, closing ramp, lift transient, static hold and release. Contact
// geometry is fixed per (object, pose); only the sensor noise depends on
// the seed.

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "taccompress/layout.h"
#include "taccompress/trace.h"

namespace taccompress {

struct ContactUnit {
  std::uint32_t unit = 0;
  // Share of the object's peak load carried by this unit, in (0, 1].
  float weight = 0.0f;
};

struct ObjectProfile {
  std::string name;
  // Contact units per pose, indexed by static_cast<size_t>(Pose).
  std::array<std::vector<ContactUnit>, 4> footprint;
  int peak_normal = 1;           // 1..255
  int tangential_spread = 0;     // 0..127
  double noise_sigma = 0.0;      // code units
  double irregularity = 0.0;     // 0..1, amplitude of slow load drift
  double shear_angle_rad = 0.0;  // direction of the tangential load

  const std::vector<ContactUnit>& contacts(Pose pose) const {
    return footprint[static_cast<std::size_t>(pose)];
  }
  std::vector<std::size_t> footprint_units(Pose pose) const;

  // Throws DataError when any invariant fails against the layout.
  void validate(const SensorLayout& layout) const;
};

struct PhasePlan {
  double pre_grasp_s = 10.0;
  double close_ramp_s = 2.0;
  double lift_transient_s = 1.0;
  double hold_s = 15.0;
  double release_decay_s = 1.0;

  double total_s() const {
    return pre_grasp_s + close_ramp_s + lift_transient_s + hold_s +
           release_decay_s;
  }
  void validate() const;
};

// Frames per phase. Boundaries are round(cumulative duration * rate), so
// the counts always add up to round(total duration * rate).
struct PhaseFrames {
  std::size_t pre_grasp = 0;
  std::size_t close_ramp = 0;
  std::size_t lift_transient = 0;
  std::size_t hold = 0;
  std::size_t release_decay = 0;

  std::size_t total() const {
    return pre_grasp + close_ramp + lift_transient + hold + release_decay;
  }
};

PhaseFrames phase_frames(const PhasePlan& plan, SampleRate rate);

inline constexpr std::array<const char*, 8> kObjectNames = {
    "apple",  "egg",           "orange",      "tomato",
    "potato", "vitamin_bottle", "water_bottle", "glass_bottle"};

// The eight objects, in kObjectNames order.
std::vector<ObjectProfile> default_profiles(
    const SensorLayout& layout = default_layout());

// Standard deviation of the idle sensor noise relative to noise_sigma.
inline constexpr double kBackgroundNoiseFraction = 0.08;

// Deterministic in all arguments. Throws DataError for an invalid plan,
// zero total duration, or an empty footprint for `pose`.
GraspTrace generate_trace(const ObjectProfile& profile, Pose pose,
                          const PhasePlan& plan, SampleRate rate,
                          std::uint64_t seed,
                          std::uint16_t repetition_id = 0,
                          const SensorLayout& layout = default_layout());

// SplitMix64 finalizer, used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace taccompress
