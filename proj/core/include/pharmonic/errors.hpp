#pragma once

#include <stdexcept>
#include <string>

namespace pharmonic {

/// Newton failed to reach the residual tolerance within the iteration budget.
struct NonConvergence : std::runtime_error {
  NonConvergence(const std::string& what, int iterations_, double residual_)
      : std::runtime_error(what), iterations(iterations_), residual(residual_) {}

  int iterations = 0;
  double residual = 0.0;
  int step_index = -1;  // filled in by run_flow when a step fails
};

/// The SPD solve broke down. The per-step Hessian is positive definite by
/// construction, so this signals an assembly or conditioning bug.
struct LinearSolveFailure : std::runtime_error {
  explicit LinearSolveFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Bad configuration input (file syntax, unknown key, invalid value).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// File input/output failure.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pharmonic
