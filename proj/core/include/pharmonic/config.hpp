#pragma once

#include <cmath>

namespace pharmonic {

enum class LinearSolverKind {
  Direct,             // sparse LDLT factorization
  ConjugateGradient,  // diagonally preconditioned CG
};

/// Parameters of the regularized, penalized flow. The energy of a map v with
/// target data g is
///
///   J(v) = (b/2) int |grad v|^2 + (1/p) int (|grad v|^2 + a^2)^(p/2)
///        + (1/delta) int (|v|^2 - 1)^2 / 4 + (lambda/2) int |v - g|^2,
///
/// with a = a_p(eps) and b = b_p(eps) = eps^alpha. The quadratic screen b
/// keeps the operator uniformly elliptic for p > 2; the inner shift a keeps
/// it differentiable at vanishing gradients for p < 2.
struct SolverConfig {
  double p = 1.0;
  double eps = 1e-2;
  double alpha = 2.0;
  double delta = 1e-3;
  double lambda = 1.0;
  double tau = 1e-2;
  double t_final = 1.0;

  double newton_tol = 1e-10;
  int newton_max_iter = 50;
  int quad_degree_zero_order = 4;
  LinearSolverKind linear_solver = LinearSolverKind::Direct;

  /// Inner regularization shift: eps for 1 <= p < 2, zero for p >= 2.
  double a_p() const { return p < 2.0 ? eps : 0.0; }

  /// Quadratic screening weight eps^alpha.
  double b_p() const { return std::pow(eps, alpha); }

  /// Number of implicit steps covering [0, t_final]; the last step may
  /// overshoot t_final by less than tau.
  int num_steps() const;

  double adjusted_t_final() const { return num_steps() * tau; }

  /// Throws std::invalid_argument on any out-of-range parameter.
  void validate() const;
};

}  // namespace pharmonic
