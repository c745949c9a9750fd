#include "taccompress/simulator.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "taccompress/error.h"

namespace taccompress {
namespace {

// Physical sensors are 10 units wide; canonical unit order is row-major
// over that grid.
constexpr int kGridColumns = 10;
constexpr float kMinContactWeight = 0.25f;
// Share of the tangential load that stays on during the hold (gravity).
constexpr double kStaticShear = 0.3;
// Slow load drift during the hold: relative amplitude at irregularity 1
// and its frequency.
constexpr double kDriftAmplitude = 0.12;
constexpr double kDriftHz = 0.3;

struct ObjectShape {
  const char* name;
  int peak_normal;
  int tangential_spread;
  double noise_sigma;
  double irregularity;
  double radius_rows;  // patch radii in grid cells
  double radius_cols;
  double shear_deg;
};

// Eggs are light and regular, apples heavy and irregular; bottles give
// elongated line contacts.
constexpr ObjectShape kShapes[] = {
    {"apple", 150, 40, 2.5, 0.80, 1.9, 1.9, 30.0},
    {"egg", 45, 10, 0.6, 0.05, 1.4, 1.2, 75.0},
    {"orange", 120, 30, 1.8, 0.50, 2.0, 2.0, 120.0},
    {"tomato", 85, 20, 1.4, 0.40, 1.7, 1.7, 165.0},
    {"potato", 130, 35, 2.0, 0.70, 1.7, 2.1, 210.0},
    {"vitamin_bottle", 70, 25, 1.0, 0.15, 2.6, 1.1, 255.0},
    {"water_bottle", 110, 30, 1.5, 0.20, 3.0, 1.2, 300.0},
    {"glass_bottle", 140, 35, 1.2, 0.10, 3.3, 1.3, 345.0},
};
static_assert(std::size(kShapes) == kObjectNames.size());

// How strongly a pose loads a sensor, relative to the fingertip load.
// Fingertips dominate every pose; palm-side sensors join for power grasps.
double engagement(Pose pose, std::size_t finger, std::size_t finger_count,
                  SensorPosition position) {
  const bool thumb = finger + 1 == finger_count;
  const bool index = finger == 0;
  const bool middle = finger == 1;
  switch (pose) {
    case Pose::kPinch:
      if (position != SensorPosition::kDistal) return 0.0;
      return (thumb || index) ? 1.0 : 0.6;
    case Pose::kTripod:
      if (position != SensorPosition::kDistal) return 0.0;
      return (thumb || index || middle) ? 1.0 : 0.6;
    case Pose::kSpherical:
      if (position == SensorPosition::kDistal) return 1.0;
      return position == SensorPosition::kIntermediate ? 0.3 : 0.0;
    case Pose::kCylindrical:
      return position == SensorPosition::kDistal ? 1.0 : 0.35;
  }
  return 0.0;
}

double pose_force_gain(Pose pose) {
  switch (pose) {
    case Pose::kPinch:
      return 0.85;
    case Pose::kTripod:
      return 0.9;
    case Pose::kSpherical:
      return 1.0;
    case Pose::kCylindrical:
      return 1.15;
  }
  return 1.0;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

double unit_interval(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

ObjectProfile build_profile(const ObjectShape& shape, const SensorLayout& layout) {
  ObjectProfile p;
  p.name = shape.name;
  p.peak_normal = shape.peak_normal;
  p.tangential_spread = shape.tangential_spread;
  p.noise_sigma = shape.noise_sigma;
  p.irregularity = shape.irregularity;
  p.shear_angle_rad = shape.shear_deg * std::numbers::pi / 180.0;

  const std::uint64_t name_hash = fnv1a(p.name);
  const std::size_t finger_count = layout.fingers().size();
  for (std::size_t s = 0; s < layout.sensors().size(); ++s) {
    const SensorSlot& slot = layout.sensors()[s];
    const int rows = static_cast<int>((slot.unit_count + kGridColumns - 1) / kGridColumns);
    // Where the object touches this sensor is a property of its shape.
    const std::uint64_t h = mix_seed(name_hash, s);
    const double row_lo = std::min(1.5, (rows - 1) / 2.0);
    const double row_hi = std::max(row_lo, rows - 2.5);
    const double center_row = row_lo + unit_interval(h) * (row_hi - row_lo);
    const double center_col = 1.5 + unit_interval(mix_seed(h, 1)) * (kGridColumns - 4.0);
    for (Pose pose : kAllPoses) {
      const double gain = engagement(pose, slot.finger_index, finger_count, slot.position);
      if (gain <= 0.0) continue;
      auto& contacts = p.footprint[static_cast<std::size_t>(pose)];
      for (std::size_t u = 0; u < slot.unit_count; ++u) {
        const double dr = (static_cast<double>(u / kGridColumns) - center_row) / shape.radius_rows;
        const double dc = (static_cast<double>(u % kGridColumns) - center_col) / shape.radius_cols;
        const double w = std::exp(-0.5 * (dr * dr + dc * dc));
        if (w < kMinContactWeight) continue;
        contacts.push_back({static_cast<std::uint32_t>(slot.first_unit + u),
                            static_cast<float>(w * gain)});
      }
    }
  }
  return p;
}

// Distribution of round(n) for n ~ N(0, sigma^2) truncated to
// [-3 sigma, 3 sigma], as 64-bit cumulative thresholds so one uniform
// draw selects a value.
class QuantizedNoise {
 public:
  explicit QuantizedNoise(double sigma) {
    const double limit = 3.0 * sigma;
    const int k_max = static_cast<int>(std::floor(limit + 0.5));
    if (sigma <= 0.0 || k_max == 0) return;
    auto cdf = [&](double v) {
      v = std::clamp(v, -limit, limit);
      return 0.5 * std::erfc(-v / (sigma * std::numbers::sqrt2));
    };
    const double lo = cdf(-limit);
    const double mass = cdf(limit) - lo;
    for (int k = -k_max; k <= k_max; ++k) {
      const double upper = (cdf(k + 0.5) - lo) / mass;
      values_.push_back(k);
      thresholds_.push_back(upper >= 1.0 ? ~0ull
                                         : static_cast<std::uint64_t>(std::ldexp(upper, 64)));
    }
    thresholds_.back() = ~0ull;
  }

  bool trivial() const { return values_.empty(); }

  int draw(std::uint64_t bits) const {
    std::size_t i = 0;
    while (bits > thresholds_[i]) ++i;
    return values_[i];
  }

 private:
  std::vector<int> values_;
  std::vector<std::uint64_t> thresholds_;
};

class Gaussian {
 public:
  explicit Gaussian(std::uint64_t seed) : engine_(seed) {}

  // Box-Muller over 53-bit uniforms; both outputs are used.
  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - unit_interval(engine_());  // (0, 1]
    const double u2 = unit_interval(engine_());
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

inline std::uint8_t quantize(double v) {
  // nearbyint rounds half to even under the default rounding mode.
  const double r = std::nearbyint(v);
  return static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
}

inline double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

}  // namespace

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::vector<std::size_t> ObjectProfile::footprint_units(Pose pose) const {
  std::vector<std::size_t> out;
  for (const auto& c : contacts(pose)) out.push_back(c.unit);
  return out;
}

void ObjectProfile::validate(const SensorLayout& layout) const {
  for (Pose pose : kAllPoses) {
    const auto& contacts = this->contacts(pose);
    if (contacts.empty()) {
      throw DataError("profile " + name + " has an empty footprint for " +
                      std::string(pose_name(pose)));
    }
    for (const auto& c : contacts) {
      if (c.unit >= layout.total_units()) {
        throw DataError("profile " + name + " references unit " +
                        std::to_string(c.unit) + " outside the layout");
      }
      if (!(c.weight > 0.0f && c.weight <= 1.0f)) {
        throw DataError("profile " + name + " has a contact weight outside (0, 1]");
      }
    }
  }
  if (peak_normal < 1 || peak_normal > 255) throw DataError("peak_normal must be in 1..255");
  if (tangential_spread < 0 || tangential_spread > 127) {
    throw DataError("tangential_spread must be in 0..127");
  }
  if (!std::isfinite(noise_sigma) || noise_sigma < 0.0) {
    throw DataError("noise_sigma must be finite and non-negative");
  }
  if (!(irregularity >= 0.0 && irregularity <= 1.0)) {
    throw DataError("irregularity must be in [0, 1]");
  }
}

void PhasePlan::validate() const {
  for (double d : {pre_grasp_s, close_ramp_s, lift_transient_s, hold_s, release_decay_s}) {
    if (!std::isfinite(d) || d < 0.0) throw DataError("phase durations must be >= 0");
  }
  if (total_s() <= 0.0) throw DataError("phase plan has zero total duration");
}

PhaseFrames phase_frames(const PhasePlan& plan, SampleRate rate) {
  plan.validate();
  const double hz = rate.hz();
  const double durations[] = {plan.pre_grasp_s, plan.close_ramp_s,
                              plan.lift_transient_s, plan.hold_s,
                              plan.release_decay_s};
  std::size_t counts[5];
  double cumulative = 0.0;
  long long previous = 0;
  for (int i = 0; i < 5; ++i) {
    cumulative += durations[i];
    const long long boundary = std::llround(cumulative * hz);
    counts[i] = static_cast<std::size_t>(boundary - previous);
    previous = boundary;
  }
  return {counts[0], counts[1], counts[2], counts[3], counts[4]};
}

std::vector<ObjectProfile> default_profiles(const SensorLayout& layout) {
  std::vector<ObjectProfile> profiles;
  for (const auto& shape : kShapes) profiles.push_back(build_profile(shape, layout));
  return profiles;
}

GraspTrace generate_trace(const ObjectProfile& profile, Pose pose,
                          const PhasePlan& plan, SampleRate rate,
                          std::uint64_t seed, std::uint16_t repetition_id,
                          const SensorLayout& layout) {
  plan.validate();
  profile.validate(layout);
  const PhaseFrames phases = phase_frames(plan, rate);
  if (phases.total() == 0) throw DataError("phase plan yields zero frames");

  const std::size_t units = layout.total_units();
  const auto& contacts = profile.contacts(pose);
  const double force_gain = pose_force_gain(pose);

  // Per-contact constants.
  struct Contact {
    std::size_t unit;
    double level;      // hold normal load
    double shear_x;    // full tangential excursion
    double shear_y;
    double phase;      // drift phase
  };
  std::vector<Contact> active;
  active.reserve(contacts.size());
  const std::uint64_t name_hash = fnv1a(profile.name);
  for (const auto& c : contacts) {
    const UnitAddress addr = layout.address_of(c.unit);
    // The thumb opposes the fingers, so its shear points the other way.
    const double sign = addr.finger_index + 1 == layout.fingers().size() ? -1.0 : 1.0;
    const double spread = profile.tangential_spread * c.weight * sign;
    active.push_back({c.unit, profile.peak_normal * force_gain * c.weight,
                      spread * std::cos(profile.shear_angle_rad),
                      spread * std::sin(profile.shear_angle_rad),
                      2.0 * std::numbers::pi * unit_interval(mix_seed(name_hash, c.unit))});
  }

  const std::uint64_t stream = mix_seed(mix_seed(seed, fnv1a(profile.name)),
                                        static_cast<std::uint64_t>(pose));
  std::mt19937_64 idle_engine(mix_seed(stream, 0));
  Gaussian contact_noise(mix_seed(stream, 1));
  const QuantizedNoise idle(kBackgroundNoiseFraction * profile.noise_sigma);
  const double sigma = profile.noise_sigma;

  std::vector<ForceSample> samples(phases.total() * units);
  const double hz = rate.hz();
  std::size_t t = 0;

  auto idle_frame = [&](ForceSample* frame) {
    for (std::size_t u = 0; u < units; ++u) {
      ForceSample s = kRestSample;
      if (!idle.trivial()) {
        s.x = static_cast<std::uint8_t>(128 + idle.draw(idle_engine()));
        s.y = static_cast<std::uint8_t>(128 + idle.draw(idle_engine()));
        s.z = static_cast<std::uint8_t>(std::max(0, idle.draw(idle_engine())));
      }
      frame[u] = s;
    }
  };
  auto noise = [&] { return sigma > 0.0 ? sigma * contact_noise.next() : 0.0; };

  for (std::size_t k = 0; k < phases.pre_grasp; ++k, ++t) {
    idle_frame(&samples[t * units]);
  }
  for (std::size_t k = 0; k < phases.close_ramp; ++k, ++t) {
    ForceSample* frame = &samples[t * units];
    idle_frame(frame);
    const double s = smoothstep(static_cast<double>(k + 1) / phases.close_ramp);
    for (const auto& c : active) {
      frame[c.unit] = {quantize(128.0 + kStaticShear * c.shear_x * s),
                       quantize(128.0 + kStaticShear * c.shear_y * s),
                       quantize(c.level * s)};
    }
  }
  for (std::size_t k = 0; k < phases.lift_transient; ++k, ++t) {
    ForceSample* frame = &samples[t * units];
    idle_frame(frame);
    const double excursion =
        kStaticShear + (1.0 - kStaticShear) *
                           std::sin(std::numbers::pi * (k + 0.5) / phases.lift_transient);
    for (const auto& c : active) {
      const double x = 128.0 + excursion * c.shear_x + noise();
      const double y = 128.0 + excursion * c.shear_y + noise();
      const double z = c.level + noise();
      frame[c.unit] = {quantize(x), quantize(y), quantize(z)};
    }
  }
  for (std::size_t k = 0; k < phases.hold; ++k, ++t) {
    ForceSample* frame = &samples[t * units];
    idle_frame(frame);
    const double seconds = static_cast<double>(k) / hz;
    for (const auto& c : active) {
      const double drift = profile.irregularity * kDriftAmplitude *
                           std::sin(2.0 * std::numbers::pi * kDriftHz * seconds + c.phase);
      const double x = 128.0 + kStaticShear * c.shear_x * (1.0 + drift) + noise();
      const double y = 128.0 + kStaticShear * c.shear_y * (1.0 + drift) + noise();
      const double z = c.level * (1.0 + drift) + noise();
      frame[c.unit] = {quantize(x), quantize(y), quantize(z)};
    }
  }
  for (std::size_t k = 0; k < phases.release_decay; ++k, ++t) {
    ForceSample* frame = &samples[t * units];
    idle_frame(frame);
    const double s = 1.0 - smoothstep(static_cast<double>(k + 1) / phases.release_decay);
    for (const auto& c : active) {
      frame[c.unit] = {quantize(128.0 + kStaticShear * c.shear_x * s),
                       quantize(128.0 + kStaticShear * c.shear_y * s),
                       quantize(c.level * s)};
    }
  }

  TraceMetadata meta;
  meta.sample_rate = rate;
  meta.object_label = profile.name;
  meta.pose = pose;
  meta.repetition_id = repetition_id;
  return GraspTrace(layout, std::move(meta), std::move(samples));
}

}  // namespace taccompress
