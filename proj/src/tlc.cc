#include "taccompress/tlc.h"

#include <zlib.h>

#include <array>
#include <cstring>
#include <memory>
#include <string>

#include "internal/byte_io.h"
#include "internal/range_coder.h"
#include "simd/kernels.h"
#include "taccompress/error.h"
#include "taccompress/simd.h"

namespace taccompress {
namespace {

using internal::BitModel;
using internal::RangeDecoder;
using internal::RangeEncoder;

constexpr std::uint8_t kModeLossless = 0;
constexpr std::uint8_t kModeLossy = 1;
constexpr int kBuckets = 3;
// Residual symbols equal to this after the zero flag are impossible
// (zigzag tops out at 255) and mark a desynchronized decoder.
constexpr unsigned kTreeInvalid = 255;

struct ResidualContext {
  BitModel zero;
  std::array<BitModel, 256> tree;
};

// Adaptive state: one context per (channel, activity bucket).
class ResidualModel {
 public:
  ResidualContext& at(std::size_t channel, std::uint8_t bucket) {
    return contexts_[channel * kBuckets + bucket];
  }

 private:
  std::array<ResidualContext, kChannels * kBuckets> contexts_;
};

inline unsigned zigzag(std::uint8_t residual) {
  const int s = static_cast<std::int8_t>(residual);
  return s >= 0 ? static_cast<unsigned>(2 * s) : static_cast<unsigned>(-2 * s - 1);
}

inline std::uint8_t unzigzag(unsigned v) {
  const int s = (v & 1u) ? -static_cast<int>((v + 1) / 2) : static_cast<int>(v / 2);
  return static_cast<std::uint8_t>(s);
}

inline void encode_residual(RangeEncoder& enc, ResidualContext& ctx,
                            std::uint8_t residual) {
  const unsigned v = zigzag(residual);
  enc.encode(ctx.zero, v != 0);
  if (v == 0) return;
  const unsigned m = v - 1;
  unsigned node = 1;
  for (int k = 7; k >= 0; --k) {
    const int bit = static_cast<int>((m >> k) & 1u);
    enc.encode(ctx.tree[node], bit);
    node = 2 * node + static_cast<unsigned>(bit);
  }
}

inline std::uint8_t decode_residual(RangeDecoder& dec, ResidualContext& ctx) {
  if (!dec.decode(ctx.zero)) return 0;
  unsigned node = 1;
  for (int k = 0; k < 8; ++k) node = 2 * node + static_cast<unsigned>(dec.decode(ctx.tree[node]));
  const unsigned m = node - 256;
  if (m == kTreeInvalid) throw FormatError("corrupted TLC1 payload: invalid residual symbol");
  return unzigzag(m + 1);
}

struct Neighbors {
  std::uint8_t left, up, up_left;
};

// Border rule: the first row predicts from the left neighbour (the rest
// code for the first pixel), the first column predicts from above.
inline Neighbors neighbors(const std::uint8_t* raster, std::size_t row,
                           std::size_t i, std::size_t stride) {
  if (row == 0) {
    const std::uint8_t left =
        i >= kChannels ? raster[i - kChannels] : kChannelRest[i % kChannels];
    return {left, left, left};
  }
  const std::uint8_t* cur = raster + row * stride;
  const std::uint8_t* prev = cur - stride;
  if (i < kChannels) return {prev[i], prev[i], prev[i]};
  return {cur[i - kChannels], prev[i], prev[i - kChannels]};
}

void write_header(internal::ByteWriter& w, std::uint8_t mode, int qp,
                  const TactileImage& image, std::uint64_t payload_length) {
  w.bytes(std::span(reinterpret_cast<const std::uint8_t*>(kTlcMagic), 4));
  w.u8(kTlcVersion);
  w.u8(mode);
  w.u8(static_cast<std::uint8_t>(qp));
  w.u32(static_cast<std::uint32_t>(image.width()));
  w.u32(static_cast<std::uint32_t>(image.height()));
  w.u8(static_cast<std::uint8_t>(kChannels));
  w.u64(payload_length);
}

std::uint32_t checksum(std::span<const std::uint8_t> raster) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  std::size_t pos = 0;
  while (pos < raster.size()) {
    const std::size_t n = std::min<std::size_t>(raster.size() - pos, 1u << 30);
    crc = crc32(crc, raster.data() + pos, static_cast<uInt>(n));
    pos += n;
  }
  return static_cast<std::uint32_t>(crc);
}

std::vector<std::uint8_t> assemble(std::uint8_t mode, int qp,
                                   const TactileImage& image,
                                   const std::vector<std::uint8_t>& coded,
                                   std::span<const std::uint8_t> reconstruction) {
  std::vector<std::uint8_t> out;
  out.reserve(coded.size() + kTlcOverheadBytes);
  internal::ByteWriter w(out);
  write_header(w, mode, qp, image, coded.size());
  w.bytes(coded);
  w.u32(checksum(reconstruction));
  return out;
}

void check_dims(const TactileImage& image) {
  if (image.width() == 0 || image.height() == 0) throw DataError("empty image");
  if (image.width() > 0xFFFFFFFFull || image.height() > 0xFFFFFFFFull) {
    throw DataError("image too large for TLC1");
  }
}

// Lossless residual coding. Interior residuals of every row come from
// the SIMD kernel; borders are handled here.
std::vector<std::uint8_t> code_lossless(const TactileImage& image) {
  const std::size_t stride = image.row_stride();
  const std::uint8_t* raster = image.samples().data();
  const auto& kernels = simd::active();
  std::vector<std::uint8_t> residual(stride);
  std::vector<std::uint8_t> bucket(stride);
  std::vector<std::uint8_t> coded;
  coded.reserve(image.sample_count() / 16 + 64);
  RangeEncoder enc(coded);
  auto model = std::make_unique<ResidualModel>();
  for (std::size_t row = 0; row < image.height(); ++row) {
    const std::uint8_t* cur = raster + row * stride;
    if (row == 0) {
      for (std::size_t i = 0; i < stride; ++i) {
        const Neighbors n = neighbors(raster, 0, i, stride);
        residual[i] = static_cast<std::uint8_t>(cur[i] - n.left);
        bucket[i] = 0;
      }
    } else {
      const std::uint8_t* prev = cur - stride;
      for (std::size_t i = 0; i < kChannels; ++i) {
        residual[i] = static_cast<std::uint8_t>(cur[i] - prev[i]);
        bucket[i] = 0;
      }
      kernels.med_residuals_u8(cur, prev, stride, kChannels, residual.data(),
                               bucket.data());
    }
    std::size_t channel = 0;
    for (std::size_t i = 0; i < stride; ++i) {
      encode_residual(enc, model->at(channel, bucket[i]), residual[i]);
      if (++channel == kChannels) channel = 0;
    }
  }
  enc.finish();
  return coded;
}

// DPCM loop for qp >= 2. Predictions use reconstructed samples.
std::vector<std::uint8_t> code_lossy(const TactileImage& image, int step,
                                     std::vector<std::uint8_t>& recon) {
  const std::size_t stride = image.row_stride();
  const std::uint8_t* src = image.samples().data();
  recon.assign(image.sample_count(), 0);
  std::vector<std::uint8_t> coded;
  RangeEncoder enc(coded);
  auto model = std::make_unique<ResidualModel>();
  for (std::size_t row = 0; row < image.height(); ++row) {
    for (std::size_t i = 0; i < stride; ++i) {
      const Neighbors n = neighbors(recon.data(), row, i, stride);
      const int pred = simd::detail::med(n.left, n.up, n.up_left);
      const std::uint8_t b = simd::detail::activity_bucket(
          n.left, n.up, n.up_left, simd::kActivityHigh);
      const std::size_t at = row * stride + i;
      const int q = deadzone_quantize(static_cast<int>(src[at]) - pred, step);
      // Lies between pred and the source sample, so never out of range.
      recon[at] = static_cast<std::uint8_t>(pred + deadzone_dequantize(q, step));
      encode_residual(enc, model->at(i % kChannels, b), static_cast<std::uint8_t>(q));
    }
  }
  enc.finish();
  return coded;
}

template <bool kQuantized>
inline std::uint8_t reconstruct(int pred, std::uint8_t sym, int step) {
  if constexpr (!kQuantized) {
    return static_cast<std::uint8_t>(pred + sym);
  } else {
    const int v = pred + deadzone_dequantize(static_cast<std::int8_t>(sym), step);
    return static_cast<std::uint8_t>(v < 0 ? 0 : (v > 255 ? 255 : v));
  }
}

template <bool kQuantized>
void decode_rows(RangeDecoder& dec, ResidualModel& model, std::uint8_t* out,
                 std::size_t stride, std::size_t height, int step) {
  // First row: predict from the left neighbour.
  for (std::size_t i = 0; i < stride; ++i) {
    const int pred = i >= kChannels ? out[i - kChannels] : kChannelRest[i];
    const std::uint8_t sym = decode_residual(dec, model.at(i % kChannels, 0));
    out[i] = reconstruct<kQuantized>(pred, sym, step);
  }
  for (std::size_t row = 1; row < height; ++row) {
    std::uint8_t* cur = out + row * stride;
    const std::uint8_t* prev = cur - stride;
    for (std::size_t c = 0; c < kChannels; ++c) {
      const std::uint8_t sym = decode_residual(dec, model.at(c, 0));
      cur[c] = reconstruct<kQuantized>(prev[c], sym, step);
    }
    std::size_t channel = 0;
    for (std::size_t i = kChannels; i < stride; ++i) {
      const std::uint8_t l = cur[i - kChannels];
      const std::uint8_t u = prev[i];
      const std::uint8_t ul = prev[i - kChannels];
      const int pred = simd::detail::med(l, u, ul);
      const std::uint8_t b = simd::detail::activity_bucket(l, u, ul, simd::kActivityHigh);
      const std::uint8_t sym = decode_residual(dec, model.at(channel, b));
      cur[i] = reconstruct<kQuantized>(pred, sym, step);
      if (++channel == kChannels) channel = 0;
    }
  }
}

std::vector<std::uint8_t> decode_payload(std::span<const std::uint8_t> coded,
                                         std::size_t width, std::size_t height,
                                         bool quantized, int step) {
  const std::size_t stride = width * kChannels;
  std::vector<std::uint8_t> out(stride * height);
  RangeDecoder dec(coded);
  auto model = std::make_unique<ResidualModel>();
  if (quantized) {
    decode_rows<true>(dec, *model, out.data(), stride, height, step);
  } else {
    decode_rows<false>(dec, *model, out.data(), stride, height, step);
  }
  return out;
}

struct Parsed {
  TlcHeader header;
  std::span<const std::uint8_t> coded;
  std::uint32_t checksum = 0;
};

Parsed parse(std::span<const std::uint8_t> bitstream) {
  if (bitstream.empty()) throw FormatError("empty TLC1 payload");
  internal::ByteReader r(bitstream, "TLC1 bitstream");
  const auto magic = r.bytes(4);
  if (std::memcmp(magic.data(), kTlcMagic, 4) != 0) {
    throw FormatError("bad magic: not a TLC1 bitstream");
  }
  const std::uint8_t version = r.u8();
  if (version != kTlcVersion) {
    throw FormatError("unsupported TLC1 version " + std::to_string(version));
  }
  Parsed p;
  const std::uint8_t mode = r.u8();
  if (mode != kModeLossless && mode != kModeLossy) {
    throw FormatError("unknown TLC1 mode " + std::to_string(mode));
  }
  p.header.lossy = mode == kModeLossy;
  p.header.qp = r.u8();
  p.header.width = r.u32();
  p.header.height = r.u32();
  const std::uint8_t channels = r.u8();
  p.header.payload_length = r.u64();
  if (channels != kChannels) throw FormatError("TLC1 stream is not 3-channel");
  if (p.header.width == 0 || p.header.height == 0) {
    throw FormatError("TLC1 stream has a zero dimension");
  }
  if (p.header.lossy && (p.header.qp < kMinQp || p.header.qp > kMaxQp)) {
    throw FormatError("TLC1 qp out of range");
  }
  if (p.header.payload_length > r.remaining()) {
    throw FormatError("truncated TLC1 payload");
  }
  p.coded = r.bytes(static_cast<std::size_t>(p.header.payload_length));
  p.checksum = r.u32();
  if (r.remaining() != 0) throw FormatError("trailing bytes after TLC1 checksum");
  return p;
}

}  // namespace

int deadzone_quantize(int residual, int step) {
  const int magnitude = (residual < 0 ? -residual : residual) / step;
  return residual < 0 ? -magnitude : magnitude;
}

int deadzone_dequantize(int index, int step) {
  return index * step;
}

CompressedBlob encode_lossless(const TactileImage& image) {
  check_dims(image);
  const auto coded = code_lossless(image);
  CompressedBlob blob;
  blob.codec_id = kTlcLosslessId;
  blob.width = image.width();
  blob.height = image.height();
  blob.payload = assemble(kModeLossless, 0, image, coded, image.samples());
  return blob;
}

CompressedBlob encode_lossy(const TactileImage& image, int qp) {
  check_dims(image);
  if (qp < kMinQp || qp > kMaxQp) {
    throw DataError("qp must be in [1, 64], got " + std::to_string(qp));
  }
  CompressedBlob blob;
  blob.codec_id = kTlcLossyId;
  blob.width = image.width();
  blob.height = image.height();
  blob.quality = qp;
  if (qp == 1) {
    const auto coded = code_lossless(image);
    blob.payload = assemble(kModeLossy, qp, image, coded, image.samples());
  } else {
    std::vector<std::uint8_t> recon;
    const auto coded = code_lossy(image, qp, recon);
    blob.payload = assemble(kModeLossy, qp, image, coded, recon);
  }
  return blob;
}

TlcHeader read_tlc_header(std::span<const std::uint8_t> bitstream) {
  return parse(bitstream).header;
}

TactileImage decode_tlc(std::span<const std::uint8_t> bitstream) {
  const Parsed p = parse(bitstream);
  const bool quantized = p.header.lossy && p.header.qp > 1;
  auto raster = decode_payload(p.coded, p.header.width, p.header.height,
                               quantized, p.header.qp);
  if (checksum(raster) != p.checksum) {
    throw FormatError("TLC1 checksum mismatch: corrupted payload");
  }
  return TactileImage(p.header.width, p.header.height, std::move(raster));
}

TactileImage decode_lossless(const CompressedBlob& blob) {
  if (blob.payload.empty()) throw FormatError("empty TLC1 payload");
  if (read_tlc_header(blob.payload).lossy) {
    throw FormatError("TLC1 stream is lossy; use decode_lossy");
  }
  return decode_tlc(blob.payload);
}

TactileImage decode_lossy(const CompressedBlob& blob) {
  if (blob.payload.empty()) throw FormatError("empty TLC1 payload");
  if (!read_tlc_header(blob.payload).lossy) {
    throw FormatError("TLC1 stream is lossless; use decode_lossless");
  }
  return decode_tlc(blob.payload);
}

CompressedBlob blob_from_bitstream(std::vector<std::uint8_t> bitstream) {
  const TlcHeader h = read_tlc_header(bitstream);
  CompressedBlob blob;
  blob.codec_id = h.lossy ? kTlcLossyId : kTlcLosslessId;
  blob.width = h.width;
  blob.height = h.height;
  if (h.lossy) blob.quality = h.qp;
  blob.payload = std::move(bitstream);
  return blob;
}

}  // namespace taccompress
