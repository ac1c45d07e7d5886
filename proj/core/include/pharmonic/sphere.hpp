#pragma once

#include <Eigen/Dense>

#include "pharmonic/field.hpp"
#include "pharmonic/mesh.hpp"

namespace pharmonic {

struct ProjectionResult {
  NodalField field;
  int fallback_count = 0;  // nodes whose vector was too short to normalize
};

/// Nodewise radial projection v -> v / |v|. Nodes with |v| < 1e-12 receive
/// `fallback`, which must be a unit vector of matching dimension.
ProjectionResult project_to_sphere(const NodalField& u, const Eigen::VectorXd& fallback);

struct ConstraintReport {
  double l2_violation = 0.0;          // || |u|^2 - 1 ||_L2(Omega)
  double linf_nodal_violation = 0.0;  // max over nodes of | |u(node)| - 1 |
  double scaled_violation = 0.0;      // l2_violation / sqrt(delta)
};

/// How far u sits from the unit-sphere constraint. The penalty scheme keeps
/// l2_violation of order sqrt(delta), so scaled_violation is the
/// delta-independent quantity to monitor. The L2 norm uses the degree-4 rule.
ConstraintReport constraint_report(const TriMesh& mesh, const NodalField& u, double delta);

/// Wedge product. For 3-vectors the cross product; for 2-vectors the scalar
/// a1 b2 - a2 b1, returned as a 1-vector.
Eigen::VectorXd wedge(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// int ((u - u_prev)/tau . u)^2 dx. The exact flow moves tangentially to the
/// sphere (u_t . u = 0); for a discrete step on the sphere the integrand is
/// only the O(theta^4) chord error, so growth beyond that flags constraint
/// drift. Diagnostic only, never asserted by the solver.
double orthogonality_defect(const TriMesh& mesh, const NodalField& u, const NodalField& u_prev,
                            double tau);

}  // namespace pharmonic
