#pragma once

#include <string>

#include "pharmonic/imaging.hpp"

namespace pharmonic {

enum class PpmFormat {
  P6,  // binary, the default interchange format
  P3,  // ASCII
};

/// Read a P6 or P3 PPM with maxval 255. Channels map to [0, 1] by /255.
/// Throws IoError on missing files, malformed headers, or truncated data.
RgbImage read_ppm(const std::string& path);

/// Write a PPM with maxval 255. Channels are quantized round-half-up to
/// 8 bits, so write/read round trips are bit-exact on quantized values.
void write_ppm(const std::string& path, const RgbImage& img, PpmFormat format = PpmFormat::P6);

}  // namespace pharmonic
