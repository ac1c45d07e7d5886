#pragma once

#include <Eigen/Dense>

namespace pharmonic {

struct TriMesh;

/// Coefficients of a vector-valued P1 finite element function. Storage is
/// node-major: the n-vector at node i occupies values[i*n .. i*n+n-1].
struct NodalField {
  int n_components = 0;
  Eigen::VectorXd values;

  NodalField() = default;
  NodalField(int num_nodes, int n) : n_components(n), values(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_nodes) * n)) {}

  static NodalField constant(int num_nodes, const Eigen::VectorXd& value);

  int num_nodes() const { return n_components > 0 ? static_cast<int>(values.size()) / n_components : 0; }

  Eigen::VectorBlock<Eigen::VectorXd> node(int i) { return values.segment(static_cast<Eigen::Index>(i) * n_components, n_components); }
  Eigen::VectorBlock<const Eigen::VectorXd> node(int i) const { return values.segment(static_cast<Eigen::Index>(i) * n_components, n_components); }

  bool all_finite() const { return values.allFinite(); }

  /// Largest Euclidean norm over nodal vectors.
  double max_nodal_modulus() const;
};

/// L2(Omega) norm of the interpolant, exact for P1 data.
double l2_norm(const TriMesh& mesh, const NodalField& u);

/// L2(Omega) distance between two fields on the same mesh.
double l2_distance(const TriMesh& mesh, const NodalField& u, const NodalField& v);

}  // namespace pharmonic
