#include "taccompress/layout.h"

#include <algorithm>
#include <string>

#include "taccompress/error.h"

namespace taccompress {

std::string_view position_name(SensorPosition position) {
  switch (position) {
    case SensorPosition::kDistal:
      return "distal";
    case SensorPosition::kIntermediate:
      return "intermediate";
    case SensorPosition::kProximal:
      return "proximal";
  }
  return "unknown";
}

SensorLayout::SensorLayout(std::vector<FingerLayout> fingers)
    : fingers_(std::move(fingers)) {
  if (fingers_.empty()) throw DataError("sensor layout has no fingers");
  for (std::size_t f = 0; f < fingers_.size(); ++f) {
    const auto& finger = fingers_[f];
    if (finger.sensors.empty()) {
      throw DataError("finger " + std::to_string(f) + " has no sensors");
    }
    for (std::size_t s = 0; s < finger.sensors.size(); ++s) {
      const auto& spec = finger.sensors[s];
      if (spec.unit_count == 0) {
        throw DataError("sensor " + std::to_string(s) + " of finger " +
                        std::to_string(f) + " has no units");
      }
      slots_.push_back({f, s, spec.position, total_units_, spec.unit_count});
      total_units_ += spec.unit_count;
    }
  }
}

const SensorSlot& SensorLayout::sensor(std::size_t finger_index,
                                       std::size_t sensor_index) const {
  for (const auto& slot : slots_) {
    if (slot.finger_index == finger_index &&
        slot.sensor_index == sensor_index) {
      return slot;
    }
  }
  throw DataError("no such sensor");
}

UnitAddress SensorLayout::address_of(std::size_t unit) const {
  if (unit >= total_units_) throw DataError("unit index out of range");
  // Slots are sorted by first_unit; find the last slot starting at or
  // before the unit.
  auto it = std::upper_bound(
      slots_.begin(), slots_.end(), unit,
      [](std::size_t u, const SensorSlot& slot) { return u < slot.first_unit; });
  const SensorSlot& slot = *(it - 1);
  return {slot.finger_index, slot.sensor_index, unit - slot.first_unit};
}

std::size_t SensorLayout::unit_of(const UnitAddress& address) const {
  const SensorSlot& slot = sensor(address.finger_index, address.sensor_index);
  if (address.unit_index >= slot.unit_count) {
    throw DataError("unit index out of range for sensor");
  }
  return slot.first_unit + address.unit_index;
}

SensorLayout default_layout() {
  const SensorSpec distal{SensorPosition::kDistal, kDistalUnits};
  const SensorSpec intermediate{SensorPosition::kIntermediate,
                                kIntermediateUnits};
  const SensorSpec proximal{SensorPosition::kProximal, kProximalUnits};
  std::vector<FingerLayout> fingers;
  for (std::uint8_t id = 0; id < 3; ++id) {
    fingers.push_back({id, {distal, intermediate, proximal}});
  }
  fingers.push_back({3, {distal, proximal}});
  return SensorLayout(std::move(fingers));
}

}  // namespace taccompress
