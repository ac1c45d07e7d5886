#pragma once

#include <functional>
#include <vector>

#include "pharmonic/config.hpp"
#include "pharmonic/energy.hpp"
#include "pharmonic/field.hpp"
#include "pharmonic/mesh.hpp"

namespace pharmonic {

struct StepResult {
  NodalField field;
  int newton_iterations = 0;
  double final_residual_norm = 0.0;
  double gk_decrease = 0.0;  // G_k(u_prev) - G_k(u); >= 0 up to rounding
};

/// One row of the flow diagnostic record. Step 0 carries the initial state
/// with zero velocity and dissipation.
struct TraceRow {
  int step = 0;
  double time = 0.0;
  EnergyBreakdown energy;
  double dt_norm_sq = 0.0;          // || (u^k - u^{k-1}) / tau ||_L2^2
  double cum_dissipation = 0.0;     // (tau/2) sum_{j<=k} dt_norm_sq_j
  double constraint_l2 = 0.0;       // || |u^k|^2 - 1 ||_L2
  double max_modulus = 0.0;         // max nodal |u^k|
  double orth_defect = 0.0;         // int ((u^k - u^{k-1})/tau . u^k)^2
  double gk_decrease = 0.0;         // per-step descent, not serialized
  int newton_iters = 0;
};

struct FlowTrace {
  std::vector<TraceRow> rows;
  bool stopped_early = false;

  int steps_taken() const { return static_cast<int>(rows.size()) - 1; }
};

/// Optional knobs for run_flow that are not model parameters.
struct RunControl {
  bool stop_when_stationary = false;
  double stationarity_tol = 1e-6;
  // Called after each accepted step with (step index, current iterate).
  std::function<void(int, const NodalField&)> on_step;
};

struct FlowResult {
  FlowTrace trace;
  NodalField field;
};

/// Minimize the per-step functional about u_prev by damped Newton iteration
/// (backtracking line search, Armijo constant 1e-4) until the Euclidean
/// residual norm drops to config.newton_tol. The start iterate is u_prev, so
/// a stationary state returns immediately with zero iterations.
StepResult implicit_step(const TriMesh& mesh, const NodalField& u_prev, const NodalField& g,
                         const SolverConfig& config, const ConvexSplitting& splitting);

/// Run num_steps() implicit steps from u0 and record the full trace.
/// NonConvergence from a step is annotated with the step index and rethrown.
FlowResult run_flow(const TriMesh& mesh, const NodalField& u0, const NodalField& g,
                    const SolverConfig& config, const ConvexSplitting& splitting,
                    const RunControl& control = RunControl{});

/// Piecewise-linear-in-time interpolant through the snapshots
/// fields[0..L] taken at t_k = k*tau. Requires 0 <= t <= L*tau.
NodalField time_interpolant(const std::vector<NodalField>& fields, double tau, double t);

/// True iff ||u - u_prev||_L2 / tau <= threshold.
bool stationarity_check(const TriMesh& mesh, const NodalField& u, const NodalField& u_prev,
                        double tau, double threshold);

}  // namespace pharmonic
