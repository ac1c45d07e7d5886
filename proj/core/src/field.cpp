#include "pharmonic/field.hpp"

#include <cmath>
#include <stdexcept>

#include "pharmonic/mesh.hpp"

namespace pharmonic {

NodalField NodalField::constant(int num_nodes, const Eigen::VectorXd& value) {
  NodalField f(num_nodes, static_cast<int>(value.size()));
  for (int i = 0; i < num_nodes; ++i) f.node(i) = value;
  return f;
}

double NodalField::max_nodal_modulus() const {
  double best = 0.0;
  const int count = num_nodes();
  for (int i = 0; i < count; ++i) best = std::max(best, node(i).norm());
  return best;
}

namespace {

// int_Omega |u - v|^2 with v omitted when null. The integrand is quadratic in
// the P1 shape functions, so the degree-2 rule is exact.
double l2_sq(const TriMesh& mesh, const NodalField& u, const NodalField* v) {
  if (u.num_nodes() != mesh.num_nodes())
    throw std::invalid_argument("l2_norm: field does not match mesh");
  if (v && (v->num_nodes() != u.num_nodes() || v->n_components != u.n_components))
    throw std::invalid_argument("l2_distance: field shapes differ");
  const QuadratureRule& rule = quadrature_rule(2);
  const int n = u.n_components;
  Eigen::MatrixXd local(n, 3);
  double total = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& el = mesh.elements[e];
    for (int loc = 0; loc < 3; ++loc) {
      local.col(loc) = u.node(el[loc]);
      if (v) local.col(loc) -= v->node(el[loc]);
    }
    double acc = 0.0;
    for (int q = 0; q < rule.num_points(); ++q)
      acc += rule.weights[q] * (local * rule.points[q]).squaredNorm();
    total += mesh.geometry[e].area * acc;
  }
  return total;
}

}  // namespace

double l2_norm(const TriMesh& mesh, const NodalField& u) { return std::sqrt(l2_sq(mesh, u, nullptr)); }

double l2_distance(const TriMesh& mesh, const NodalField& u, const NodalField& v) {
  return std::sqrt(l2_sq(mesh, u, &v));
}

}  // namespace pharmonic
