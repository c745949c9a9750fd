#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace taccompress {

enum class SensorPosition : std::uint8_t {
  kDistal = 0,
  kIntermediate = 1,
  kProximal = 2,
};

std::string_view position_name(SensorPosition position);

struct SensorSpec {
  SensorPosition position = SensorPosition::kDistal;
  std::uint16_t unit_count = 0;

  bool operator==(const SensorSpec&) const = default;
};

struct FingerLayout {
  std::uint8_t finger_id = 0;
  std::vector<SensorSpec> sensors;

  bool operator==(const FingerLayout&) const = default;
};

// One sensor located in the canonical unit numbering.
struct SensorSlot {
  std::size_t finger_index = 0;
  std::size_t sensor_index = 0;
  SensorPosition position = SensorPosition::kDistal;
  std::size_t first_unit = 0;
  std::size_t unit_count = 0;
};

struct UnitAddress {
  std::size_t finger_index = 0;
  std::size_t sensor_index = 0;
  std::size_t unit_index = 0;

  bool operator==(const UnitAddress&) const = default;
};

// Finger/sensor/unit topology of a tactile hand.
//
// Units are numbered 0..total_units()-1 by (finger index, sensor index
// within the finger, unit index within the sensor). The numbering is part
// of the MPTD file format and of the image column order.
class SensorLayout {
 public:
  // Throws DataError when a finger has no sensors or a sensor has no units.
  explicit SensorLayout(std::vector<FingerLayout> fingers);

  const std::vector<FingerLayout>& fingers() const { return fingers_; }
  const std::vector<SensorSlot>& sensors() const { return slots_; }
  std::size_t total_units() const { return total_units_; }
  std::size_t sensor_count() const { return slots_.size(); }

  const SensorSlot& sensor(std::size_t finger_index,
                           std::size_t sensor_index) const;
  UnitAddress address_of(std::size_t unit) const;
  std::size_t unit_of(const UnitAddress& address) const;

  bool operator==(const SensorLayout& other) const {
    return fingers_ == other.fingers_;
  }

 private:
  std::vector<FingerLayout> fingers_;
  std::vector<SensorSlot> slots_;
  std::size_t total_units_ = 0;
};

inline constexpr std::uint16_t kDistalUnits = 120;
inline constexpr std::uint16_t kIntermediateUnits = 60;
inline constexpr std::uint16_t kProximalUnits = 120;

// Four fingers; the first three carry distal, intermediate and proximal
// sensors, the last (thumb-like) finger has no intermediate sensor.
// 11 sensors, 1140 units.
SensorLayout default_layout();

}  // namespace taccompress
