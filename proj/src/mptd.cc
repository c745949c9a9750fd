#include "taccompress/mptd.h"

#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <limits>
#include <ostream>

#include "internal/byte_io.h"
#include "taccompress/error.h"

namespace taccompress {
namespace internal {

std::vector<std::uint8_t> read_all(std::istream& in) {
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (in.bad()) throw FormatError("read failure");
  return data;
}

}  // namespace internal

namespace {

void check_writable(const GraspTrace& trace) {
  if (trace.frame_count() == 0) throw DataError("cannot save an empty trace");
  const auto& meta = trace.metadata();
  if (meta.object_label.size() > 255) {
    throw DataError("object label longer than 255 bytes");
  }
  const auto& fingers = trace.layout().fingers();
  if (fingers.size() > 255) throw DataError("more than 255 fingers");
  for (const auto& finger : fingers) {
    if (finger.sensors.size() > 255) throw DataError("more than 255 sensors");
  }
  if (trace.frame_count() > std::numeric_limits<std::uint32_t>::max()) {
    throw DataError("frame count exceeds 32 bits");
  }
}

std::vector<std::uint8_t> encode_header(const GraspTrace& trace) {
  std::vector<std::uint8_t> bytes;
  internal::ByteWriter w(bytes);
  const auto& meta = trace.metadata();
  w.bytes(std::span(reinterpret_cast<const std::uint8_t*>(kMptdMagic), 4));
  w.u16(kMptdVersion);
  w.u32(meta.sample_rate.millihertz());
  w.u8(static_cast<std::uint8_t>(meta.pose));
  w.u16(meta.repetition_id);
  w.u8(static_cast<std::uint8_t>(meta.object_label.size()));
  w.text(meta.object_label);
  const auto& fingers = trace.layout().fingers();
  w.u8(static_cast<std::uint8_t>(fingers.size()));
  for (const auto& finger : fingers) {
    w.u8(static_cast<std::uint8_t>(finger.sensors.size()));
    for (const auto& sensor : finger.sensors) {
      w.u8(static_cast<std::uint8_t>(sensor.position));
      w.u16(sensor.unit_count);
    }
  }
  w.u32(static_cast<std::uint32_t>(trace.frame_count()));
  return bytes;
}

}  // namespace

std::size_t mptd_header_size(const GraspTrace& trace) {
  return encode_header(trace).size();
}

std::size_t save_trace(const GraspTrace& trace, std::ostream& out) {
  check_writable(trace);
  const auto header = encode_header(trace);
  const auto samples = trace.samples();
  out.write(reinterpret_cast<const char*>(header.data()),
            static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(samples.data()),
            static_cast<std::streamsize>(samples.size_bytes()));
  if (!out) throw Error("write failure while saving trace");
  return header.size() + samples.size_bytes();
}

GraspTrace load_trace(std::istream& in) {
  const auto data = internal::read_all(in);
  internal::ByteReader r(data, "MPTD header");
  const auto magic = r.bytes(4);
  if (std::memcmp(magic.data(), kMptdMagic, 4) != 0) {
    throw FormatError("bad magic: not an MPTD container");
  }
  const std::uint16_t version = r.u16();
  if (version != kMptdVersion) {
    throw FormatError("unsupported MPTD version " + std::to_string(version));
  }
  TraceMetadata meta;
  const std::uint32_t mhz = r.u32();
  if (mhz == 0) throw FormatError("zero sample rate");
  meta.sample_rate = SampleRate::from_millihertz(mhz);
  const std::uint8_t pose = r.u8();
  if (pose > 3) throw FormatError("unknown pose code " + std::to_string(pose));
  meta.pose = static_cast<Pose>(pose);
  meta.repetition_id = r.u16();
  const std::uint8_t label_len = r.u8();
  const auto label = r.bytes(label_len);
  meta.object_label.assign(label.begin(), label.end());

  std::vector<FingerLayout> fingers(r.u8());
  for (std::size_t f = 0; f < fingers.size(); ++f) {
    fingers[f].finger_id = static_cast<std::uint8_t>(f);
    fingers[f].sensors.resize(r.u8());
    for (auto& sensor : fingers[f].sensors) {
      const std::uint8_t position = r.u8();
      if (position > 2) {
        throw FormatError("unknown sensor position code " +
                          std::to_string(position));
      }
      sensor.position = static_cast<SensorPosition>(position);
      sensor.unit_count = r.u16();
    }
  }
  std::optional<SensorLayout> layout;
  try {
    layout.emplace(std::move(fingers));
  } catch (const DataError& e) {
    throw FormatError(std::string("layout total mismatch: ") + e.what());
  }
  const std::uint32_t frames = r.u32();
  if (frames == 0) throw FormatError("MPTD container holds no frames");
  const std::uint64_t expected =
      static_cast<std::uint64_t>(frames) * layout->total_units() * kAxes;
  if (r.remaining() < expected) {
    throw FormatError("truncated MPTD payload: expected " +
                      std::to_string(expected) + " bytes, found " +
                      std::to_string(r.remaining()));
  }
  if (r.remaining() > expected) {
    throw FormatError("MPTD payload longer than frame count implies");
  }
  const auto payload = r.bytes(static_cast<std::size_t>(expected));
  std::vector<ForceSample> samples(payload.size() / kAxes);
  std::memcpy(samples.data(), payload.data(), payload.size());
  return GraspTrace(std::move(*layout), std::move(meta), std::move(samples));
}

std::size_t save_trace_file(const GraspTrace& trace,
                            const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return save_trace(trace, out);
}

GraspTrace load_trace_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return load_trace(in);
}

}  // namespace taccompress
