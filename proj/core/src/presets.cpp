#include "pharmonic/presets.hpp"

#include <cmath>
#include <stdexcept>

#include "pharmonic/errors.hpp"
#include "pharmonic/rng.hpp"

namespace pharmonic {

NodalField make_preset(const std::string& name, const TriMesh& mesh, int n_components,
                       std::uint64_t seed) {
  if (n_components != 2 && n_components != 3)
    throw ConfigError("make_preset: n_components must be 2 or 3, got " +
                      std::to_string(n_components));
  if (mesh.num_nodes() < 1) throw std::invalid_argument("make_preset: empty mesh");

  const int count = mesh.num_nodes();
  NodalField f(count, n_components);

  if (name == "constant") {
    for (int i = 0; i < count; ++i) f.node(i)[n_components - 1] = 1.0;
    return f;
  }

  if (name == "smoothed-vortex") {
    Eigen::Vector2d lo = mesh.nodes[0], hi = mesh.nodes[0];
    for (const auto& node : mesh.nodes) {
      lo = lo.cwiseMin(node);
      hi = hi.cwiseMax(node);
    }
    const Eigen::Vector2d center = 0.5 * (lo + hi);
    const double radius = 0.5 * (hi - lo).maxCoeff();
    // For n = 3 the out-of-plane lift keeps the field smooth through the
    // center; for n = 2 the winding is a genuine point defect and the center
    // node (if any) falls back to (1, 0).
    const double lift = 0.5 * radius;
    for (int i = 0; i < count; ++i) {
      const Eigen::Vector2d d = mesh.nodes[i] - center;
      if (n_components == 3) {
        Eigen::Vector3d v(d.x(), d.y(), lift);
        f.node(i) = v / v.norm();
      } else {
        const double m = d.norm();
        if (m < 1e-12) {
          f.node(i) << 1.0, 0.0;
        } else {
          f.node(i) = d / m;
        }
      }
    }
    return f;
  }

  if (name == "random-unit") {
    Rng rng(seed);
    Eigen::VectorXd v(n_components);
    for (int i = 0; i < count; ++i) {
      double m = 0.0;
      do {
        for (int c = 0; c < n_components; ++c) v[c] = rng.gaussian();
        m = v.norm();
      } while (m < 1e-12);
      f.node(i) = v / m;
    }
    return f;
  }

  throw ConfigError("make_preset: unknown preset '" + name +
                    "' (expected constant, smoothed-vortex, or random-unit)");
}

}  // namespace pharmonic
