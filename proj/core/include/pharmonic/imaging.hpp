#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "pharmonic/field.hpp"
#include "pharmonic/mesh.hpp"

namespace pharmonic {

/// Linear RGB image, channels in [0, 1], pixels row-major from the top-left.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<Eigen::Vector3d> pixels;

  int num_pixels() const { return width * height; }
  const Eigen::Vector3d& at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  Eigen::Vector3d& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

/// Brightness/chromaticity split of an RGB image: eta = |I| and c = I/|I|,
/// so every chroma vector is unit.
struct ChromaImage {
  int width = 0;
  int height = 0;
  std::vector<double> brightness;
  std::vector<Eigen::Vector3d> chroma;
  int fallback_count = 0;  // pixels whose chroma came from the fallback

  int num_pixels() const { return width * height; }
};

inline Eigen::Vector3d blue_pole() { return Eigen::Vector3d(0.0, 0.0, 1.0); }

/// Split an image into brightness and unit chromaticity. Pixels with
/// |I| < 1e-12 have no direction; they receive `fallback` and are counted.
ChromaImage decompose(const RgbImage& img, const Eigen::Vector3d& fallback = blue_pole());

struct RecomposeResult {
  RgbImage image;
  int clamp_count = 0;  // channels clipped into [0, 1]
};

/// Invert decompose: pixel = eta * chroma, channels clamped to [0, 1].
RecomposeResult recompose(const ChromaImage& c);

/// Perturb each chroma component by sigma times a standard normal deviate,
/// then re-project to the sphere. Deterministic for a fixed seed.
ChromaImage chroma_noise(const ChromaImage& c, double sigma, std::uint64_t seed,
                         const Eigen::Vector3d& fallback = blue_pole());

/// Pixel grid mapped onto a mesh: one node per pixel center, unit spacing,
/// domain [0, width-1] x [0, height-1]. g carries the chroma data and the
/// flow starts from u0 = g, which is unit at every node.
struct ImageFieldBundle {
  TriMesh mesh;
  NodalField g;
  NodalField u0;
};

/// Requires width, height >= 2; throws ConfigError otherwise.
ImageFieldBundle image_to_field(const ChromaImage& c);

/// Project the evolved field back to unit chroma and pair it with the stored
/// brightness. The mesh must be the image_to_field mesh for (width, height).
ChromaImage field_to_chroma(const NodalField& u, const TriMesh& mesh, int width, int height,
                            const std::vector<double>& brightness,
                            const Eigen::Vector3d& fallback = blue_pole());

}  // namespace pharmonic
