#include "pharmonic/flow.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "pharmonic/errors.hpp"
#include "pharmonic/sphere.hpp"

namespace pharmonic {

namespace {

Eigen::VectorXd solve_spd(const Eigen::SparseMatrix<double>& h, const Eigen::VectorXd& rhs,
                          LinearSolverKind kind) {
  if (kind == LinearSolverKind::Direct) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    solver.compute(h);
    if (solver.info() != Eigen::Success)
      throw LinearSolveFailure("implicit_step: sparse LDLT factorization failed");
    Eigen::VectorXd x = solver.solve(rhs);
    if (solver.info() != Eigen::Success)
      throw LinearSolveFailure("implicit_step: sparse LDLT solve failed");
    return x;
  }
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(1e-13);
  cg.setMaxIterations(4 * h.rows() + 100);
  cg.compute(h);
  Eigen::VectorXd x = cg.solve(rhs);
  if (cg.info() != Eigen::Success)
    throw LinearSolveFailure("implicit_step: conjugate gradient did not converge");
  return x;
}

}  // namespace

StepResult implicit_step(const TriMesh& mesh, const NodalField& u_prev, const NodalField& g,
                         const SolverConfig& config, const ConvexSplitting& splitting) {
  config.validate();
  if (!u_prev.all_finite())
    throw std::invalid_argument("implicit_step: u_prev has non-finite entries");

  StepResult result;
  result.field = u_prev;
  // Work with phi(v) = G(v) - G(u_prev) in exact difference form; phi(u_prev)
  // is identically zero and decreases stay resolvable near convergence.
  double value = 0.0;
  Eigen::VectorXd grad = gk_gradient(mesh, result.field, u_prev, g, config, splitting);
  double residual = grad.norm();

  // Below this value difference, comparisons of phi are dominated by rounding
  // of its O(energy)-sized terms; the line search then falls back to
  // requiring a residual reduction instead of a value reduction.
  constexpr double kArmijo = 1e-4;
  double noise_scale =
      1.0 + mesh.total_area() + total_energy(mesh, u_prev, g, config).total;
  if (!splitting.w_plus_diff)
    noise_scale += 0.25 * mesh.total_area() / config.delta;
  const double value_noise = 16.0 * std::numeric_limits<double>::epsilon() * noise_scale;

  int iters = 0;
  NodalField trial = result.field;
  Eigen::VectorXd trial_grad;
  while (residual > config.newton_tol) {
    if (iters >= config.newton_max_iter)
      throw NonConvergence("implicit_step: Newton stopped after " + std::to_string(iters) +
                               " iterations with residual " + std::to_string(residual),
                           iters, residual);
    const Eigen::SparseMatrix<double> hessian =
        gk_hessian(mesh, result.field, u_prev, g, config, splitting);
    const Eigen::VectorXd direction = solve_spd(hessian, -grad, config.linear_solver);
    const double slope = grad.dot(direction);
    if (!(slope < 0.0))
      throw LinearSolveFailure("implicit_step: Newton direction is not a descent direction");

    double step = 1.0;
    while (true) {
      trial.values = result.field.values + step * direction;
      const double trial_value = gk_value_shifted(mesh, trial, u_prev, g, config, splitting);
      bool have_trial_grad = false;
      bool accepted = trial_value <= value + kArmijo * step * slope;
      if (!accepted && kArmijo * step * (-slope) <= value_noise &&
          trial_value <= value + value_noise) {
        trial_grad = gk_gradient(mesh, trial, u_prev, g, config, splitting);
        have_trial_grad = true;
        accepted = trial_grad.norm() < residual;
      }
      if (accepted) {
        result.field.values.swap(trial.values);
        value = trial_value;
        if (!have_trial_grad)
          trial_grad = gk_gradient(mesh, result.field, u_prev, g, config, splitting);
        grad.swap(trial_grad);
        residual = grad.norm();
        break;
      }
      step *= 0.5;
      if (step < 1e-14)
        throw NonConvergence("implicit_step: line search stalled at residual " +
                                 std::to_string(residual),
                             iters, residual);
    }
    ++iters;
  }

  result.newton_iterations = iters;
  result.final_residual_norm = residual;
  result.gk_decrease = 0.0 - value;
  return result;
}

FlowResult run_flow(const TriMesh& mesh, const NodalField& u0, const NodalField& g,
                    const SolverConfig& config, const ConvexSplitting& splitting,
                    const RunControl& control) {
  config.validate();
  const int num_steps = config.num_steps();

  FlowResult out;
  out.field = u0;
  out.trace.rows.reserve(num_steps + 1);

  double cum_dissipation = 0.0;
  const auto push_row = [&](int k, const NodalField& u, const NodalField* prev, int iters,
                            double gk_decrease) {
    TraceRow row;
    row.step = k;
    row.time = k * config.tau;
    row.energy = total_energy(mesh, u, g, config);
    if (prev != nullptr) {
      const double dist = l2_distance(mesh, u, *prev);
      row.dt_norm_sq = (dist / config.tau) * (dist / config.tau);
      cum_dissipation += 0.5 * config.tau * row.dt_norm_sq;
      row.orth_defect = orthogonality_defect(mesh, u, *prev, config.tau);
    }
    row.cum_dissipation = cum_dissipation;
    row.constraint_l2 = constraint_report(mesh, u, config.delta).l2_violation;
    row.max_modulus = u.max_nodal_modulus();
    row.gk_decrease = gk_decrease;
    row.newton_iters = iters;
    out.trace.rows.push_back(row);
  };

  push_row(0, out.field, nullptr, 0, 0.0);
  NodalField prev = out.field;
  for (int k = 1; k <= num_steps; ++k) {
    StepResult step;
    try {
      step = implicit_step(mesh, prev, g, config, splitting);
    } catch (NonConvergence& err) {
      err.step_index = k;
      throw;
    }
    out.field = std::move(step.field);
    push_row(k, out.field, &prev, step.newton_iterations, step.gk_decrease);
    if (control.on_step) control.on_step(k, out.field);
    const bool stationary =
        control.stop_when_stationary &&
        stationarity_check(mesh, out.field, prev, config.tau, control.stationarity_tol);
    prev = out.field;
    if (stationary) {
      out.trace.stopped_early = true;
      break;
    }
  }
  return out;
}

NodalField time_interpolant(const std::vector<NodalField>& fields, double tau, double t) {
  if (fields.empty()) throw std::invalid_argument("time_interpolant: no snapshots");
  if (!(tau > 0.0)) throw std::invalid_argument("time_interpolant: tau must be positive");
  const int last = static_cast<int>(fields.size()) - 1;
  const double t_end = last * tau;
  if (t < -1e-12 * tau || t > t_end + 1e-12 * std::max(tau, t_end))
    throw std::out_of_range("time_interpolant: t outside [0, L*tau]");
  if (last == 0) return fields[0];

  const double position = std::min(std::max(t / tau, 0.0), static_cast<double>(last));
  const double nearest = std::round(position);
  if (std::abs(position - nearest) < 1e-9)  // exactly a knot, return it bitwise
    return fields[static_cast<int>(nearest)];
  const int k = std::min(static_cast<int>(position), last - 1);
  const double theta = position - k;
  NodalField out = fields[k];
  out.values = (1.0 - theta) * fields[k].values + theta * fields[k + 1].values;
  return out;
}

bool stationarity_check(const TriMesh& mesh, const NodalField& u, const NodalField& u_prev,
                        double tau, double threshold) {
  if (!(tau > 0.0)) throw std::invalid_argument("stationarity_check: tau must be positive");
  return l2_distance(mesh, u, u_prev) / tau <= threshold;
}

}  // namespace pharmonic
