#include "pharmonic/imaging.hpp"

#include <cmath>
#include <stdexcept>

#include "pharmonic/errors.hpp"
#include "pharmonic/rng.hpp"
#include "pharmonic/sphere.hpp"

namespace pharmonic {

namespace {

void require_unit(const Eigen::Vector3d& fallback, const char* who) {
  if (std::abs(fallback.norm() - 1.0) > 1e-9)
    throw std::invalid_argument(std::string(who) + ": fallback must be a unit vector");
}

void require_consistent(const ChromaImage& c, const char* who) {
  const std::size_t count = static_cast<std::size_t>(c.width) * c.height;
  if (c.width < 1 || c.height < 1 || c.brightness.size() != count || c.chroma.size() != count)
    throw std::invalid_argument(std::string(who) + ": inconsistent chroma image");
}

}  // namespace

ChromaImage decompose(const RgbImage& img, const Eigen::Vector3d& fallback) {
  require_unit(fallback, "decompose");
  if (img.width < 1 || img.height < 1 ||
      img.pixels.size() != static_cast<std::size_t>(img.width) * img.height)
    throw std::invalid_argument("decompose: inconsistent image dimensions");

  ChromaImage c;
  c.width = img.width;
  c.height = img.height;
  c.brightness.reserve(img.pixels.size());
  c.chroma.reserve(img.pixels.size());
  for (const auto& px : img.pixels) {
    const double eta = px.norm();
    c.brightness.push_back(eta);
    if (eta < 1e-12) {
      c.chroma.push_back(fallback);
      ++c.fallback_count;
    } else {
      c.chroma.push_back(px / eta);
    }
  }
  return c;
}

RecomposeResult recompose(const ChromaImage& c) {
  require_consistent(c, "recompose");
  RecomposeResult out;
  out.image.width = c.width;
  out.image.height = c.height;
  out.image.pixels.reserve(c.chroma.size());
  for (std::size_t i = 0; i < c.chroma.size(); ++i) {
    Eigen::Vector3d px = c.brightness[i] * c.chroma[i];
    for (int ch = 0; ch < 3; ++ch) {
      // Count only genuine clips; (1 + rounding) overshoots clamp silently.
      if (px[ch] < -1e-12 || px[ch] > 1.0 + 1e-12) ++out.clamp_count;
      px[ch] = std::min(1.0, std::max(0.0, px[ch]));
    }
    out.image.pixels.push_back(px);
  }
  return out;
}

ChromaImage chroma_noise(const ChromaImage& c, double sigma, std::uint64_t seed,
                         const Eigen::Vector3d& fallback) {
  require_consistent(c, "chroma_noise");
  require_unit(fallback, "chroma_noise");
  if (!(sigma >= 0.0)) throw std::invalid_argument("chroma_noise: sigma must be >= 0");
  if (sigma == 0.0) return c;

  ChromaImage out = c;
  out.fallback_count = 0;
  Rng rng(seed);
  for (auto& v : out.chroma) {
    v += sigma * Eigen::Vector3d(rng.gaussian(), rng.gaussian(), rng.gaussian());
    const double m = v.norm();
    if (m < 1e-12) {
      v = fallback;
      ++out.fallback_count;
    } else {
      v /= m;
    }
  }
  return out;
}

ImageFieldBundle image_to_field(const ChromaImage& c) {
  require_consistent(c, "image_to_field");
  if (c.width < 2 || c.height < 2)
    throw ConfigError("image_to_field: image must be at least 2x2 pixels, got " +
                      std::to_string(c.width) + "x" + std::to_string(c.height));

  ImageFieldBundle out;
  // One node per pixel center with unit spacing: mesh node j*(width)+i sits
  // at (i, j) and pairs with the pixel at flat index j*width+i.
  out.mesh = build_rect_mesh(c.width - 1, c.height - 1, static_cast<double>(c.width - 1),
                             static_cast<double>(c.height - 1));
  out.g = NodalField(out.mesh.num_nodes(), 3);
  for (int i = 0; i < out.mesh.num_nodes(); ++i) out.g.node(i) = c.chroma[i];
  out.u0 = out.g;
  return out;
}

ChromaImage field_to_chroma(const NodalField& u, const TriMesh& mesh, int width, int height,
                            const std::vector<double>& brightness,
                            const Eigen::Vector3d& fallback) {
  require_unit(fallback, "field_to_chroma");
  const std::size_t count = static_cast<std::size_t>(width) * height;
  if (width < 2 || height < 2 || mesh.num_nodes() != width * height ||
      u.num_nodes() != width * height || u.n_components != 3 || brightness.size() != count ||
      // Pixel meshes are row-major with unit spacing, so node `width` starts
      // the second row at (0, 1). A swapped width/height pair keeps the node
      // count but fails this wrap-around test.
      mesh.nodes[width].x() != 0.0 || mesh.nodes[width].y() != 1.0)
    throw std::invalid_argument("field_to_chroma: field/mesh/image dimensions do not agree");

  const ProjectionResult projected = project_to_sphere(u, fallback);
  ChromaImage c;
  c.width = width;
  c.height = height;
  c.brightness = brightness;
  c.chroma.reserve(count);
  for (int i = 0; i < width * height; ++i) c.chroma.push_back(projected.field.node(i));
  c.fallback_count = projected.fallback_count;
  return c;
}

}  // namespace pharmonic
