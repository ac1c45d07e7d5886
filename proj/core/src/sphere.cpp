#include "pharmonic/sphere.hpp"

#include <cmath>
#include <stdexcept>

namespace pharmonic {

ProjectionResult project_to_sphere(const NodalField& u, const Eigen::VectorXd& fallback) {
  if (fallback.size() != u.n_components)
    throw std::invalid_argument("project_to_sphere: fallback dimension mismatch");
  if (std::abs(fallback.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("project_to_sphere: fallback must be a unit vector");
  ProjectionResult out;
  out.field = u;
  const int count = u.num_nodes();
  for (int i = 0; i < count; ++i) {
    const double m = out.field.node(i).norm();
    if (m < 1e-12) {
      out.field.node(i) = fallback;
      ++out.fallback_count;
    } else {
      out.field.node(i) /= m;
    }
  }
  return out;
}

ConstraintReport constraint_report(const TriMesh& mesh, const NodalField& u, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("constraint_report: delta must be positive");
  if (u.num_nodes() != mesh.num_nodes())
    throw std::invalid_argument("constraint_report: field does not match mesh");
  const QuadratureRule& rule = quadrature_rule(4);
  const int n = u.n_components;

  ConstraintReport report;
  Eigen::MatrixXd local(n, 3);
  double l2_sq = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& el = mesh.elements[e];
    for (int loc = 0; loc < 3; ++loc) local.col(loc) = u.node(el[loc]);
    double acc = 0.0;
    for (int q = 0; q < rule.num_points(); ++q) {
      const double v = (local * rule.points[q]).squaredNorm() - 1.0;
      acc += rule.weights[q] * v * v;
    }
    l2_sq += mesh.geometry[e].area * acc;
  }
  report.l2_violation = std::sqrt(l2_sq);
  report.scaled_violation = report.l2_violation / std::sqrt(delta);
  for (int i = 0; i < u.num_nodes(); ++i)
    report.linf_nodal_violation =
        std::max(report.linf_nodal_violation, std::abs(u.node(i).norm() - 1.0));
  return report;
}

Eigen::VectorXd wedge(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw std::invalid_argument("wedge: dimension mismatch");
  if (a.size() == 2) {
    Eigen::VectorXd r(1);
    r[0] = a[0] * b[1] - a[1] * b[0];
    return r;
  }
  if (a.size() == 3) {
    Eigen::VectorXd r(3);
    r[0] = a[1] * b[2] - a[2] * b[1];
    r[1] = a[2] * b[0] - a[0] * b[2];
    r[2] = a[0] * b[1] - a[1] * b[0];
    return r;
  }
  throw std::invalid_argument("wedge: only 2- and 3-vectors are supported");
}

double orthogonality_defect(const TriMesh& mesh, const NodalField& u, const NodalField& u_prev,
                            double tau) {
  if (u.num_nodes() != mesh.num_nodes() || u_prev.num_nodes() != u.num_nodes() ||
      u_prev.n_components != u.n_components)
    throw std::invalid_argument("orthogonality_defect: field shapes differ");
  if (!(tau > 0.0)) throw std::invalid_argument("orthogonality_defect: tau must be positive");
  const QuadratureRule& rule = quadrature_rule(4);
  const int n = u.n_components;

  Eigen::MatrixXd lu(n, 3), lv(n, 3);
  double total = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& el = mesh.elements[e];
    for (int loc = 0; loc < 3; ++loc) {
      lu.col(loc) = u.node(el[loc]);
      lv.col(loc) = (u.node(el[loc]) - u_prev.node(el[loc])) / tau;
    }
    double acc = 0.0;
    for (int q = 0; q < rule.num_points(); ++q) {
      const double dot = (lv * rule.points[q]).dot(lu * rule.points[q]);
      acc += rule.weights[q] * dot * dot;
    }
    total += mesh.geometry[e].area * acc;
  }
  return total;
}

}  // namespace pharmonic
