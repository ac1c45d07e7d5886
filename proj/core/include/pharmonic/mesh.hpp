#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "pharmonic/field.hpp"

namespace pharmonic {

/// Per-element cache: signed area (positive for counterclockwise vertices)
/// and the constant gradients of the three P1 hat functions.
struct ElementGeometry {
  double area = 0.0;
  std::array<Eigen::Vector2d, 3> shape_gradients;
};

/// Conforming triangulation of a planar polygonal domain.
struct TriMesh {
  std::vector<Eigen::Vector2d> nodes;
  std::vector<std::array<int, 3>> elements;  // counterclockwise vertex indices
  std::vector<int> boundary_nodes;           // sorted, duplicate-free
  std::vector<ElementGeometry> geometry;     // one entry per element

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_elements() const { return static_cast<int>(elements.size()); }

  /// Maximum element diameter.
  double mesh_size() const;

  /// Sum of element areas.
  double total_area() const;
};

/// Uniform triangulation of [0, lx] x [0, ly] with nx x ny cells, each cell
/// split along the diagonal from its lower-left to its upper-right corner.
/// Nodes are numbered row-major from (0, 0).
TriMesh build_rect_mesh(int nx, int ny, double lx = 1.0, double ly = 1.0);

/// Quadrature rule on the reference triangle {x, y >= 0, x + y <= 1}, stored
/// in barycentric coordinates with weights that sum to one, so
/// int_K f = |K| * sum_q w_q f(x_q) on any straight-sided element K.
struct QuadratureRule {
  int degree = 0;
  std::vector<Eigen::Vector3d> points;
  std::vector<double> weights;

  int num_points() const { return static_cast<int>(points.size()); }
};

/// Rule exact for polynomials of total degree <= degree. Supported: 1, 2, 4.
const QuadratureRule& quadrature_rule(int degree);

/// Constant gradient of the P1 interpolant of `field` on one element, as an
/// n x 2 matrix (rows are components, columns are d/dx1 and d/dx2).
Eigen::MatrixXd p1_gradient_on_element(const TriMesh& mesh, int element, const NodalField& field);

}  // namespace pharmonic
