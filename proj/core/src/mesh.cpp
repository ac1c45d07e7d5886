#include "pharmonic/mesh.hpp"

#include <cmath>
#include <stdexcept>

namespace pharmonic {

namespace {

ElementGeometry make_geometry(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                              const Eigen::Vector2d& c) {
  const Eigen::Vector2d e1 = b - a;
  const Eigen::Vector2d e2 = c - a;
  const double twice_area = e1.x() * e2.y() - e1.y() * e2.x();
  if (!(twice_area > 0.0)) throw std::invalid_argument("mesh: element is degenerate or clockwise");
  ElementGeometry geo;
  geo.area = 0.5 * twice_area;
  // Barycentric coordinates: lambda_b = det(x - a, e2)/det(e1, e2), and
  // similarly for lambda_c; the three gradients sum to zero.
  const double inv = 1.0 / twice_area;
  geo.shape_gradients[1] = inv * Eigen::Vector2d(e2.y(), -e2.x());
  geo.shape_gradients[2] = inv * Eigen::Vector2d(-e1.y(), e1.x());
  geo.shape_gradients[0] = -geo.shape_gradients[1] - geo.shape_gradients[2];
  return geo;
}

}  // namespace

double TriMesh::mesh_size() const {
  double h = 0.0;
  for (const auto& el : elements)
    for (int loc = 0; loc < 3; ++loc)
      h = std::max(h, (nodes[el[loc]] - nodes[el[(loc + 1) % 3]]).norm());
  return h;
}

double TriMesh::total_area() const {
  double area = 0.0;
  for (const auto& geo : geometry) area += geo.area;
  return area;
}

TriMesh build_rect_mesh(int nx, int ny, double lx, double ly) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("build_rect_mesh: nx and ny must be >= 1");
  if (!(lx > 0.0) || !(ly > 0.0))
    throw std::invalid_argument("build_rect_mesh: side lengths must be positive");

  TriMesh mesh;
  const double dx = lx / nx;
  const double dy = ly / ny;
  mesh.nodes.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) mesh.nodes.emplace_back(i * dx, j * dy);

  const auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
  mesh.elements.reserve(static_cast<std::size_t>(2) * nx * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      // Every cell is split along the diagonal from its lower-left to its
      // upper-right corner; fixed orientation keeps meshes byte-stable.
      const int v00 = vid(i, j), v10 = vid(i + 1, j);
      const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      mesh.elements.push_back({v00, v10, v11});
      mesh.elements.push_back({v00, v11, v01});
    }

  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      if (i == 0 || i == nx || j == 0 || j == ny) mesh.boundary_nodes.push_back(vid(i, j));

  mesh.geometry.reserve(mesh.elements.size());
  for (const auto& el : mesh.elements)
    mesh.geometry.push_back(make_geometry(mesh.nodes[el[0]], mesh.nodes[el[1]], mesh.nodes[el[2]]));
  return mesh;
}

namespace {

QuadratureRule make_degree1() {
  QuadratureRule r;
  r.degree = 1;
  r.points = {Eigen::Vector3d(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)};
  r.weights = {1.0};
  return r;
}

QuadratureRule make_degree2() {
  QuadratureRule r;
  r.degree = 2;
  r.points = {Eigen::Vector3d(0.5, 0.5, 0.0), Eigen::Vector3d(0.0, 0.5, 0.5),
              Eigen::Vector3d(0.5, 0.0, 0.5)};
  r.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  return r;
}

// Six-point degree-4 rule: two symmetric orbits (1-2b, b, b). The closed
// forms below evaluate to the usual tabulated values
//   b = 0.445948490915965, w = 0.223381589678011 and
//   b = 0.091576213509771, w = 0.109951743655322.
QuadratureRule make_degree4() {
  QuadratureRule r;
  r.degree = 4;
  const double s10 = std::sqrt(10.0);
  const double spread = std::sqrt(38.0 - 44.0 * std::sqrt(0.4));
  const double root = std::sqrt(213125.0 - 53320.0 * s10);
  const double b[2] = {(8.0 - s10 + spread) / 18.0, (8.0 - s10 - spread) / 18.0};
  const double w[2] = {(620.0 + root) / 3720.0, (620.0 - root) / 3720.0};
  for (int orbit = 0; orbit < 2; ++orbit) {
    const double a = 1.0 - 2.0 * b[orbit];
    r.points.emplace_back(a, b[orbit], b[orbit]);
    r.points.emplace_back(b[orbit], a, b[orbit]);
    r.points.emplace_back(b[orbit], b[orbit], a);
    for (int k = 0; k < 3; ++k) r.weights.push_back(w[orbit]);
  }
  return r;
}

}  // namespace

const QuadratureRule& quadrature_rule(int degree) {
  static const QuadratureRule deg1 = make_degree1();
  static const QuadratureRule deg2 = make_degree2();
  static const QuadratureRule deg4 = make_degree4();
  switch (degree) {
    case 1: return deg1;
    case 2: return deg2;
    case 4: return deg4;
    default: throw std::invalid_argument("quadrature_rule: supported degrees are 1, 2, 4");
  }
}

Eigen::MatrixXd p1_gradient_on_element(const TriMesh& mesh, int element, const NodalField& field) {
  if (element < 0 || element >= mesh.num_elements())
    throw std::out_of_range("p1_gradient_on_element: element index out of range");
  if (field.num_nodes() != mesh.num_nodes())
    throw std::invalid_argument("p1_gradient_on_element: field does not match mesh");
  const auto& el = mesh.elements[element];
  const auto& geo = mesh.geometry[element];
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(field.n_components, 2);
  for (int loc = 0; loc < 3; ++loc)
    grad.noalias() += field.node(el[loc]) * geo.shape_gradients[loc].transpose();
  return grad;
}

}  // namespace pharmonic
