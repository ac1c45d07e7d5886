#include "pharmonic/config.hpp"

#include <stdexcept>

namespace pharmonic {

int SolverConfig::num_steps() const {
  // ceil(T / tau) with a guard so that T an exact multiple of tau does not
  // round up to an extra step.
  const double ratio = t_final / tau;
  int steps = static_cast<int>(std::ceil(ratio - 1e-9));
  return steps < 1 ? 1 : steps;
}

void SolverConfig::validate() const {
  if (!(p >= 1.0)) throw std::invalid_argument("config: p must be >= 1");
  if (!(eps > 0.0)) throw std::invalid_argument("config: eps must be > 0");
  if (!(alpha > 0.0)) throw std::invalid_argument("config: alpha must be > 0");
  if (!(delta > 0.0)) throw std::invalid_argument("config: delta must be > 0");
  if (!(lambda >= 0.0)) throw std::invalid_argument("config: lambda must be >= 0");
  if (!(tau > 0.0)) throw std::invalid_argument("config: tau must be > 0");
  if (!(t_final > 0.0)) throw std::invalid_argument("config: t_final must be > 0");
  if (!(newton_tol > 0.0)) throw std::invalid_argument("config: newton_tol must be > 0");
  if (newton_max_iter < 0) throw std::invalid_argument("config: newton_max_iter must be >= 0");
  if (quad_degree_zero_order != 1 && quad_degree_zero_order != 2 && quad_degree_zero_order != 4)
    throw std::invalid_argument("config: quad_degree_zero_order must be one of 1, 2, 4");
}

}  // namespace pharmonic
