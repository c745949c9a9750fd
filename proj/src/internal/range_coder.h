#pragma once

// Adaptive binary range coder with 16-bit probabilities and a 32-bit
// range. Carry propagation follows the cache/cache_size scheme: the
// encoder holds back the most recent byte plus any run of 0xFF bytes
// until it knows whether a carry will ripple into them. The first byte
// emitted is always 0 and the decoder consumes it during start-up.
// docs/formats.md has the exact arithmetic.

#include <cstdint>
#include <span>
#include <vector>

namespace taccompress::internal {

inline constexpr int kProbBits = 16;
inline constexpr std::uint32_t kProbOne = 1u << kProbBits;
inline constexpr int kAdaptShift = 5;
inline constexpr std::uint32_t kTopValue = 1u << 24;

// Probability that the next bit is 0, scaled by 2^16.
struct BitModel {
  std::uint32_t p0 = kProbOne / 2;

  void update(int bit) {
    if (bit) {
      p0 -= p0 >> kAdaptShift;
    } else {
      p0 += (kProbOne - p0) >> kAdaptShift;
    }
  }
};

class RangeEncoder {
 public:
  explicit RangeEncoder(std::vector<std::uint8_t>& out) : out_(out) {}

  void encode(BitModel& m, int bit) {
    const std::uint32_t bound = (range_ >> kProbBits) * m.p0;
    if (bit) {
      low_ += bound;
      range_ -= bound;
    } else {
      range_ = bound;
    }
    m.update(bit);
    while (range_ < kTopValue) {
      range_ <<= 8;
      shift_low();
    }
  }

  void finish() {
    for (int i = 0; i < 5; ++i) shift_low();
  }

 private:
  void shift_low() {
    if (static_cast<std::uint32_t>(low_) < 0xFF000000u || (low_ >> 32) != 0) {
      const auto carry = static_cast<std::uint8_t>(low_ >> 32);
      std::uint8_t pending = cache_;
      do {
        out_.push_back(static_cast<std::uint8_t>(pending + carry));
        pending = 0xFF;
      } while (--cache_size_ != 0);
      cache_ = static_cast<std::uint8_t>(low_ >> 24);
    }
    ++cache_size_;
    low_ = (low_ & 0x00FFFFFFu) << 8;
  }

  std::vector<std::uint8_t>& out_;
  std::uint64_t low_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint8_t cache_ = 0;
  std::uint64_t cache_size_ = 1;
};

// Reads past the end of the input as zero bytes; callers detect damage
// through the trailing checksum.
class RangeDecoder {
 public:
  explicit RangeDecoder(std::span<const std::uint8_t> in) : in_(in) {
    for (int i = 0; i < 5; ++i) code_ = (code_ << 8) | next();
  }

  int decode(BitModel& m) {
    const std::uint32_t bound = (range_ >> kProbBits) * m.p0;
    int bit;
    if (code_ < bound) {
      range_ = bound;
      bit = 0;
    } else {
      code_ -= bound;
      range_ -= bound;
      bit = 1;
    }
    m.update(bit);
    while (range_ < kTopValue) {
      range_ <<= 8;
      code_ = (code_ << 8) | next();
    }
    return bit;
  }

 private:
  std::uint32_t next() { return pos_ < in_.size() ? in_[pos_++] : (++pos_, 0u); }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
  std::uint32_t code_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
};

}  // namespace taccompress::internal
