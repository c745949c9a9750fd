#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>

#include "taccompress/image.h"

namespace taccompress {

// Binary P6 with maxval 255: "P6\n<w> <h>\n255\n" followed by the raster.
std::size_t write_ppm(const TactileImage& image, std::ostream& out);

// Accepts any PNM whitespace and '#' comments between header tokens, and
// exactly one whitespace byte after maxval. Throws FormatError on a
// malformed header, maxval other than 255, or a truncated raster.
TactileImage read_ppm(std::istream& in);

std::size_t write_ppm_file(const TactileImage& image,
                           const std::filesystem::path& path);
TactileImage read_ppm_file(const std::filesystem::path& path);

}  // namespace taccompress
