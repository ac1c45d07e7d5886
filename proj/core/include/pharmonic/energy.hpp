#pragma once

#include <functional>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "pharmonic/config.hpp"
#include "pharmonic/field.hpp"
#include "pharmonic/mesh.hpp"

namespace pharmonic {

/// Penalty density F(v) = (|v|^2 - 1)^2 / 4. F >= 0 with equality exactly on
/// the unit sphere.
double penalty_density(const Eigen::VectorXd& v);

/// |G|_eps = sqrt(|G|_F^2 + a_p(eps)^2) for an n x 2 gradient matrix G.
double regularized_gradient_norm(const Eigen::MatrixXd& grad, const SolverConfig& config);

struct EnergyBreakdown {
  double diffusion = 0.0;  // (b/2) int |grad v|^2
  double p_term = 0.0;     // (1/p) int |grad v|_eps^p
  double penalty = 0.0;    // (1/delta) int F(v)
  double fidelity = 0.0;   // (lambda/2) int |v - g|^2
  double total = 0.0;      // sum of the four parts
};

/// Splitting of the penalty density into a difference of convex functions,
/// F = W+ - W-. Each implicit step treats W+ implicitly and W- explicitly,
/// which makes the step functional convex and yields unconditional energy
/// descent.
struct ConvexSplitting {
  std::function<double(const Eigen::VectorXd&)> w_plus;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> w_plus_grad;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> w_plus_hess;
  std::function<double(const Eigen::VectorXd&)> w_minus;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> w_minus_grad;

  /// Optional cancellation-aware difference W+(a) - W+(b). When W+ is scaled
  /// by 1/delta, the naive subtraction of two O(1) values loses the digits the
  /// Newton line search needs near convergence; a closed-form difference keeps
  /// full relative precision. Leave empty to fall back to subtraction.
  std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)> w_plus_diff;

  /// W+(v) = |v|^4 / 4, W-(v) = |v|^2 / 2 - 1/4.
  static ConvexSplitting default_quartic();
};

/// Regularized energy of u, split into parts. Gradient terms are integrated
/// exactly (they are elementwise constant); zero-order terms use the
/// quadrature degree from `config`.
EnergyBreakdown total_energy(const TriMesh& mesh, const NodalField& u, const NodalField& g,
                             const SolverConfig& config);

/// Unregularized functional (1/p) int |grad u|^p + (lambda/2) int |u - g|^2,
/// i.e. the limit eps -> 0, delta -> infinity of the regularized energy.
double total_energy_unregularized(const TriMesh& mesh, const NodalField& u, const NodalField& g,
                                  const SolverConfig& config);

/// Value of the per-step minimization objective about the previous iterate:
///
///   G(v) = int |v - u_prev|^2 / (2 tau) + (b/2) |grad v|^2
///        + (1/p) |grad v|_eps^p + (lambda/2) |v - g|^2
///        + (1/delta) W+(v) - (1/delta) W-'(u_prev) . v  dx.
///
/// G is strictly convex for every tau > 0.
double gk_value(const TriMesh& mesh, const NodalField& u, const NodalField& u_prev,
                const NodalField& g, const SolverConfig& config, const ConvexSplitting& splitting);

/// gk_value(u, ...) - gk_value(u_prev, ...), evaluated termwise as exact
/// differences. The step objective contains terms of magnitude 1/delta whose
/// decrease per Newton iteration can sit far below one ulp of gk_value
/// itself; this difference form is what the line search must compare.
/// Identically zero when u == u_prev.
double gk_value_shifted(const TriMesh& mesh, const NodalField& u, const NodalField& u_prev,
                        const NodalField& g, const SolverConfig& config,
                        const ConvexSplitting& splitting);

/// Euclidean gradient of gk_value with respect to the nodal coefficients of u.
Eigen::VectorXd gk_gradient(const TriMesh& mesh, const NodalField& u, const NodalField& u_prev,
                            const NodalField& g, const SolverConfig& config,
                            const ConvexSplitting& splitting);

/// Sparse Hessian of gk_value; symmetric positive definite.
Eigen::SparseMatrix<double> gk_hessian(const TriMesh& mesh, const NodalField& u,
                                       const NodalField& u_prev, const NodalField& g,
                                       const SolverConfig& config, const ConvexSplitting& splitting);

}  // namespace pharmonic
