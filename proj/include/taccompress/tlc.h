#pragma once

// TLC1: the built-in reference codec. Lossless mode predicts each sample
// with the median edge detector and codes the residual byte with an
// adaptive binary range coder; lossy mode runs the same predictor in a
// DPCM loop around a dead-zone quantizer.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "taccompress/image.h"

namespace taccompress {

// Codec-tagged compressed bytes. For TLC1 the payload is the complete
// bitstream (header, coded data and checksum); for external codecs it is
// the codec's output file. Rate accounting always uses payload_bits().
struct CompressedBlob {
  std::string codec_id;
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t channels = kChannels;
  std::optional<int> quality;
  std::vector<std::uint8_t> payload;

  std::uint64_t payload_bits() const { return 8ull * payload.size(); }
};

inline constexpr char kTlcMagic[4] = {'T', 'L', 'C', '1'};
inline constexpr std::uint8_t kTlcVersion = 1;
inline constexpr int kMinQp = 1;
inline constexpr int kMaxQp = 64;
inline constexpr const char* kTlcLosslessId = "tlc1";
inline constexpr const char* kTlcLossyId = "tlc1-lossy";

// magic + version + mode + qp + width + height + channels + length, and
// the trailing CRC-32.
inline constexpr std::size_t kTlcOverheadBytes = 4 + 1 + 1 + 1 + 4 + 4 + 1 + 8 + 4;

CompressedBlob encode_lossless(const TactileImage& image);

// Throws FormatError on bad magic, a lossy stream, a truncated stream or a
// checksum mismatch.
TactileImage decode_lossless(const CompressedBlob& blob);

// qp in [1, 64] is the quantizer step; qp = 1 is lossless. Throws
// DataError for qp out of range.
CompressedBlob encode_lossy(const TactileImage& image, int qp);
TactileImage decode_lossy(const CompressedBlob& blob);

// Decodes either mode.
TactileImage decode_tlc(std::span<const std::uint8_t> bitstream);

// Header fields of a TLC1 bitstream without decoding it.
struct TlcHeader {
  bool lossy = false;
  int qp = 0;
  std::size_t width = 0;
  std::size_t height = 0;
  std::uint64_t payload_length = 0;
};
TlcHeader read_tlc_header(std::span<const std::uint8_t> bitstream);

// Wraps a bitstream read from disk into a blob.
CompressedBlob blob_from_bitstream(std::vector<std::uint8_t> bitstream);

// Dead-zone quantizer with step `step`: |index| = floor(|r| / step) so the
// zero bin spans (-step, step); reconstruction is index * step, the bin
// edge nearest zero, so the lattices of steps 2^k nest inside each other.
int deadzone_quantize(int residual, int step);
int deadzone_dequantize(int index, int step);

}  // namespace taccompress
