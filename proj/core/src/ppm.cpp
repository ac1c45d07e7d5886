#include "pharmonic/ppm.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pharmonic/errors.hpp"

namespace pharmonic {

namespace {

// Next header token: skips whitespace and '#' comments. PPM requires exactly
// one whitespace byte between the maxval token and the P6 raster, which this
// tokenizer consumes as the token terminator.
std::string next_token(std::istream& in, const std::string& path) {
  int c;
  for (;;) {
    c = in.get();
    if (c == std::char_traits<char>::eof())
      throw IoError("read_ppm: truncated header in " + path);
    if (c == '#') {
      while ((c = in.get()) != std::char_traits<char>::eof() && c != '\n') {
      }
      continue;
    }
    if (!std::isspace(c)) break;
  }
  std::string tok;
  while (c != std::char_traits<char>::eof() && !std::isspace(c) && c != '#') {
    tok.push_back(static_cast<char>(c));
    c = in.get();
  }
  if (c == '#') {
    while ((c = in.get()) != std::char_traits<char>::eof() && c != '\n') {
    }
  }
  return tok;
}

int parse_header_int(std::istream& in, const std::string& path, const char* what) {
  const std::string tok = next_token(in, path);
  try {
    std::size_t used = 0;
    const int value = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return value;
  } catch (const std::exception&) {
    throw IoError("read_ppm: bad " + std::string(what) + " '" + tok + "' in " + path);
  }
}

int quantize(double channel) {
  const int q = static_cast<int>(std::floor(channel * 255.0 + 0.5));  // round half up
  return q < 0 ? 0 : (q > 255 ? 255 : q);
}

}  // namespace

RgbImage read_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_ppm: cannot open " + path);

  const std::string magic = next_token(in, path);
  if (magic != "P6" && magic != "P3")
    throw IoError("read_ppm: unsupported format '" + magic + "' in " + path);
  const int width = parse_header_int(in, path, "width");
  const int height = parse_header_int(in, path, "height");
  const int maxval = parse_header_int(in, path, "maxval");
  if (width < 1 || height < 1)
    throw IoError("read_ppm: invalid dimensions in " + path);
  if (maxval != 255) throw IoError("read_ppm: only maxval 255 is supported, got " +
                                   std::to_string(maxval) + " in " + path);

  RgbImage img;
  img.width = width;
  img.height = height;
  img.pixels.resize(static_cast<std::size_t>(width) * height);

  if (magic == "P6") {
    std::vector<unsigned char> raw(img.pixels.size() * 3);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
      throw IoError("read_ppm: truncated pixel data in " + path);
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
      img.pixels[i] = Eigen::Vector3d(raw[3 * i], raw[3 * i + 1], raw[3 * i + 2]) / 255.0;
  } else {
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
      for (int c = 0; c < 3; ++c) {
        const int v = parse_header_int(in, path, "sample");
        if (v < 0 || v > 255) throw IoError("read_ppm: sample out of range in " + path);
        img.pixels[i][c] = v / 255.0;
      }
  }
  return img;
}

void write_ppm(const std::string& path, const RgbImage& img, PpmFormat format) {
  if (img.width < 1 || img.height < 1 ||
      img.pixels.size() != static_cast<std::size_t>(img.width) * img.height)
    throw std::invalid_argument("write_ppm: inconsistent image dimensions");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_ppm: cannot open " + path + " for writing");

  out << (format == PpmFormat::P6 ? "P6" : "P3") << '\n'
      << img.width << ' ' << img.height << '\n'
      << "255\n";
  if (format == PpmFormat::P6) {
    std::vector<unsigned char> raw;
    raw.reserve(img.pixels.size() * 3);
    for (const auto& px : img.pixels)
      for (int c = 0; c < 3; ++c) raw.push_back(static_cast<unsigned char>(quantize(px[c])));
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  } else {
    for (const auto& px : img.pixels)
      out << quantize(px[0]) << ' ' << quantize(px[1]) << ' ' << quantize(px[2]) << '\n';
  }
  out.flush();
  if (!out) throw IoError("write_ppm: write failed for " + path);
}

}  // namespace pharmonic
