#pragma once

#include <cstdint>
#include <string>

#include "pharmonic/field.hpp"
#include "pharmonic/mesh.hpp"

namespace pharmonic {

/// Synthetic sphere-valued initial data on a mesh. Supported names:
///
///   constant        the last coordinate axis at every node
///   smoothed-vortex unit field winding once around the domain center;
///                   for n = 3 the third component is lifted by half the
///                   domain radius (smooth), for n = 2 the core node falls
///                   back to (1, 0) (a genuine topological defect)
///   random-unit     seeded i.i.d. gaussian vectors, normalized
///
/// Every preset returns unit vectors at all nodes. Unknown names throw
/// ConfigError.
NodalField make_preset(const std::string& name, const TriMesh& mesh, int n_components,
                       std::uint64_t seed);

}  // namespace pharmonic
