#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>

#include "taccompress/trace.h"

namespace taccompress {

inline constexpr char kMptdMagic[4] = {'M', 'P', 'T', 'D'};
inline constexpr std::uint16_t kMptdVersion = 1;

// Serializes a trace as an MPTD container (layout in docs/formats.md).
// Returns the number of bytes written. Empty traces and layouts that do
// not fit the container's field widths are rejected before any byte is
// written.
std::size_t save_trace(const GraspTrace& trace, std::ostream& out);

// Parses an MPTD container. Throws FormatError on bad magic, unsupported
// version, malformed layout, or a payload that does not match
// frame_count * total_units * 3.
GraspTrace load_trace(std::istream& in);

std::size_t save_trace_file(const GraspTrace& trace,
                            const std::filesystem::path& path);
GraspTrace load_trace_file(const std::filesystem::path& path);

// Size of the MPTD header that precedes the payload for a given trace.
std::size_t mptd_header_size(const GraspTrace& trace);

}  // namespace taccompress
