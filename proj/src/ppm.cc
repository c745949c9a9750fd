#include "taccompress/ppm.h"

#include <cctype>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "internal/byte_io.h"
#include "taccompress/error.h"

namespace taccompress {
namespace {

bool is_pnm_space(std::uint8_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
         c == '\f';
}

class HeaderParser {
 public:
  explicit HeaderParser(std::span<const std::uint8_t> data) : data_(data) {}

  void skip_space_and_comments() {
    while (pos_ < data_.size()) {
      if (is_pnm_space(data_[pos_])) {
        ++pos_;
      } else if (data_[pos_] == '#') {
        while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::size_t number(const char* what) {
    skip_space_and_comments();
    std::size_t value = 0;
    std::size_t digits = 0;
    while (pos_ < data_.size() && std::isdigit(data_[pos_])) {
      value = value * 10 + (data_[pos_] - '0');
      if (value > (std::size_t{1} << 32)) {
        throw FormatError(std::string("PPM ") + what + " too large");
      }
      ++pos_;
      ++digits;
    }
    if (digits == 0) throw FormatError(std::string("malformed PPM header: missing ") + what);
    return value;
  }

  std::size_t pos_ = 0;
  std::span<const std::uint8_t> data_;
};

}  // namespace

std::size_t write_ppm(const TactileImage& image, std::ostream& out) {
  const std::string header = "P6\n" + std::to_string(image.width()) + " " +
                             std::to_string(image.height()) + "\n255\n";
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(image.samples().data()),
            static_cast<std::streamsize>(image.sample_count()));
  if (!out) throw Error("write failure while writing PPM");
  return header.size() + image.sample_count();
}

TactileImage read_ppm(std::istream& in) {
  const auto data = internal::read_all(in);
  if (data.size() < 2 || data[0] != 'P' || data[1] != '6') {
    throw FormatError("malformed PPM header: expected P6");
  }
  HeaderParser p{std::span<const std::uint8_t>(data)};
  p.pos_ = 2;
  const std::size_t width = p.number("width");
  const std::size_t height = p.number("height");
  const std::size_t maxval = p.number("maxval");
  if (width == 0 || height == 0) throw FormatError("PPM has zero dimension");
  if (maxval != 255) {
    throw FormatError("unsupported PPM maxval " + std::to_string(maxval));
  }
  if (p.pos_ >= data.size() || !is_pnm_space(data[p.pos_])) {
    throw FormatError("malformed PPM header: no whitespace after maxval");
  }
  ++p.pos_;
  const std::size_t raster = width * height * kChannels;
  if (data.size() - p.pos_ < raster) throw FormatError("truncated PPM raster");
  std::vector<std::uint8_t> samples(data.begin() + p.pos_,
                                    data.begin() + p.pos_ + raster);
  return TactileImage(width, height, std::move(samples));
}

std::size_t write_ppm_file(const TactileImage& image,
                           const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return write_ppm(image, out);
}

TactileImage read_ppm_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return read_ppm(in);
}

}  // namespace taccompress
