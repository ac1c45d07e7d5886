#include "pharmonic/energy.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace pharmonic {

namespace {

void require_shapes(const TriMesh& mesh, const NodalField& a, const NodalField& b,
                    const char* who) {
  if (a.num_nodes() != mesh.num_nodes() || b.num_nodes() != mesh.num_nodes() ||
      a.n_components != b.n_components || a.n_components < 1)
    throw std::invalid_argument(std::string(who) + ": fields do not share the mesh shape");
}

// Derivative coefficients of the map G -> (1/p) s^{p/2}, s = |G|^2 + a^2:
// first derivative c1(s) G, second c1(s) I + c2(s) G (x) G. For p >= 2 the
// shift a vanishes and s may hit zero, where the singular branch has zero
// coefficients in the limit (except the Dirichlet case p = 2).
double pterm_value(double s, double p) { return s <= 0.0 ? 0.0 : std::pow(s, 0.5 * p) / p; }

double pterm_c1(double s, double p) {
  if (s <= 0.0) return p == 2.0 ? 1.0 : 0.0;
  return std::pow(s, 0.5 * p - 1.0);
}

double pterm_c2(double s, double p) {
  if (s <= 0.0) return 0.0;
  return (p - 2.0) * std::pow(s, 0.5 * p - 2.0);
}

void gather(const TriMesh& mesh, const NodalField& f, int e, Eigen::MatrixXd& out) {
  const auto& el = mesh.elements[e];
  for (int loc = 0; loc < 3; ++loc) out.col(loc) = f.node(el[loc]);
}

Eigen::MatrixXd local_gradient(const TriMesh& mesh, int e, const Eigen::MatrixXd& local) {
  const auto& geo = mesh.geometry[e];
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(local.rows(), 2);
  for (int loc = 0; loc < 3; ++loc)
    grad.noalias() += local.col(loc) * geo.shape_gradients[loc].transpose();
  return grad;
}

}  // namespace

double penalty_density(const Eigen::VectorXd& v) {
  const double m = v.squaredNorm() - 1.0;
  return 0.25 * m * m;
}

double regularized_gradient_norm(const Eigen::MatrixXd& grad, const SolverConfig& config) {
  const double a = config.a_p();
  return std::sqrt(grad.squaredNorm() + a * a);
}

ConvexSplitting ConvexSplitting::default_quartic() {
  ConvexSplitting s;
  s.w_plus = [](const Eigen::VectorXd& v) {
    const double q = v.squaredNorm();
    return 0.25 * q * q;
  };
  s.w_plus_grad = [](const Eigen::VectorXd& v) -> Eigen::VectorXd { return v.squaredNorm() * v; };
  s.w_plus_hess = [](const Eigen::VectorXd& v) -> Eigen::MatrixXd {
    const Eigen::Index n = v.size();
    Eigen::MatrixXd h = 2.0 * v * v.transpose();
    h.diagonal().array() += v.squaredNorm();
    return h;
  };
  s.w_minus = [](const Eigen::VectorXd& v) { return 0.5 * v.squaredNorm() - 0.25; };
  s.w_minus_grad = [](const Eigen::VectorXd& v) -> Eigen::VectorXd { return v; };
  // (|a|^4 - |b|^4) / 4 factored so the result keeps full relative precision
  // even when a and b are close.
  s.w_plus_diff = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return 0.25 * (a - b).dot(a + b) * (a.squaredNorm() + b.squaredNorm());
  };
  return s;
}

EnergyBreakdown total_energy(const TriMesh& mesh, const NodalField& u, const NodalField& g,
                             const SolverConfig& config) {
  require_shapes(mesh, u, g, "total_energy");
  const QuadratureRule& rule = quadrature_rule(config.quad_degree_zero_order);
  const double b = config.b_p();
  const double a = config.a_p();
  const double a2 = a * a;
  const int n = u.n_components;

  EnergyBreakdown out;
  Eigen::MatrixXd lu(n, 3), lg(n, 3);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double area = mesh.geometry[e].area;
    gather(mesh, u, e, lu);
    gather(mesh, g, e, lg);
    const Eigen::MatrixXd grad = local_gradient(mesh, e, lu);
    const double gsq = grad.squaredNorm();
    out.diffusion += area * 0.5 * b * gsq;
    out.p_term += area * pterm_value(gsq + a2, config.p);
    for (int q = 0; q < rule.num_points(); ++q) {
      const double w = area * rule.weights[q];
      const Eigen::VectorXd uq = lu * rule.points[q];
      out.penalty += w * penalty_density(uq) / config.delta;
      if (config.lambda != 0.0)
        out.fidelity += w * 0.5 * config.lambda * (uq - lg * rule.points[q]).squaredNorm();
    }
  }
  out.total = out.diffusion + out.p_term + out.penalty + out.fidelity;
  return out;
}

double total_energy_unregularized(const TriMesh& mesh, const NodalField& u, const NodalField& g,
                                  const SolverConfig& config) {
  require_shapes(mesh, u, g, "total_energy_unregularized");
  const QuadratureRule& rule = quadrature_rule(config.quad_degree_zero_order);
  const int n = u.n_components;
  double value = 0.0;
  Eigen::MatrixXd lu(n, 3), lg(n, 3);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double area = mesh.geometry[e].area;
    gather(mesh, u, e, lu);
    const double gsq = local_gradient(mesh, e, lu).squaredNorm();
    value += area * pterm_value(gsq, config.p);
    if (config.lambda != 0.0) {
      gather(mesh, g, e, lg);
      for (int q = 0; q < rule.num_points(); ++q)
        value += area * rule.weights[q] * 0.5 * config.lambda *
                 ((lu - lg) * rule.points[q]).squaredNorm();
    }
  }
  return value;
}

double gk_value(const TriMesh& mesh, const NodalField& u, const NodalField& u_prev,
                const NodalField& g, const SolverConfig& config,
                const ConvexSplitting& splitting) {
  require_shapes(mesh, u, u_prev, "gk_value");
  require_shapes(mesh, u, g, "gk_value");
  const QuadratureRule& rule = quadrature_rule(config.quad_degree_zero_order);
  const double b = config.b_p();
  const double a = config.a_p();
  const double a2 = a * a;
  const double inv_delta = 1.0 / config.delta;
  const double half_inv_tau = 0.5 / config.tau;
  const int n = u.n_components;

  double value = 0.0;
  Eigen::MatrixXd lu(n, 3), lp(n, 3), lg(n, 3);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double area = mesh.geometry[e].area;
    gather(mesh, u, e, lu);
    gather(mesh, u_prev, e, lp);
    gather(mesh, g, e, lg);
    const double gsq = local_gradient(mesh, e, lu).squaredNorm();
    value += area * (0.5 * b * gsq + pterm_value(gsq + a2, config.p));
    for (int q = 0; q < rule.num_points(); ++q) {
      const double w = area * rule.weights[q];
      const Eigen::VectorXd uq = lu * rule.points[q];
      const Eigen::VectorXd pq = lp * rule.points[q];
      double zero_order = half_inv_tau * (uq - pq).squaredNorm() +
                          inv_delta * (splitting.w_plus(uq) - splitting.w_minus_grad(pq).dot(uq));
      if (config.lambda != 0.0)
        zero_order += 0.5 * config.lambda * (uq - lg * rule.points[q]).squaredNorm();
      value += w * zero_order;
    }
  }
  return value;
}

double gk_value_shifted(const TriMesh& mesh, const NodalField& u, const NodalField& u_prev,
                        const NodalField& g, const SolverConfig& config,
                        const ConvexSplitting& splitting) {
  require_shapes(mesh, u, u_prev, "gk_value_shifted");
  require_shapes(mesh, u, g, "gk_value_shifted");
  const QuadratureRule& rule = quadrature_rule(config.quad_degree_zero_order);
  const double b = config.b_p();
  const double a = config.a_p();
  const double a2 = a * a;
  const double inv_delta = 1.0 / config.delta;
  const double half_inv_tau = 0.5 / config.tau;
  const int n = u.n_components;

  double value = 0.0;
  Eigen::MatrixXd lu(n, 3), lp(n, 3), lg(n, 3);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double area = mesh.geometry[e].area;
    gather(mesh, u, e, lu);
    gather(mesh, u_prev, e, lp);
    gather(mesh, g, e, lg);
    const Eigen::MatrixXd gu = local_gradient(mesh, e, lu);
    const Eigen::MatrixXd gp = local_gradient(mesh, e, lp);
    // |Gu|^2 - |Gp|^2 as (Gu - Gp) : (Gu + Gp); exact when u == u_prev.
    value += area * 0.5 * b * (gu - gp).cwiseProduct(gu + gp).sum();
    value += area * (pterm_value(gu.squaredNorm() + a2, config.p) -
                     pterm_value(gp.squaredNorm() + a2, config.p));
    for (int q = 0; q < rule.num_points(); ++q) {
      const double w = area * rule.weights[q];
      const Eigen::VectorXd uq = lu * rule.points[q];
      const Eigen::VectorXd pq = lp * rule.points[q];
      const Eigen::VectorXd dq = uq - pq;
      const double w_plus_diff = splitting.w_plus_diff
                                     ? splitting.w_plus_diff(uq, pq)
                                     : splitting.w_plus(uq) - splitting.w_plus(pq);
      double zero_order = half_inv_tau * dq.squaredNorm() +
                          inv_delta * (w_plus_diff - splitting.w_minus_grad(pq).dot(dq));
      if (config.lambda != 0.0)
        // |u - g|^2 - |p - g|^2 = (u - p) . (u + p - 2 g)
        zero_order += 0.5 * config.lambda * dq.dot(uq + pq - 2.0 * (lg * rule.points[q]));
      value += w * zero_order;
    }
  }
  return value;
}

Eigen::VectorXd gk_gradient(const TriMesh& mesh, const NodalField& u, const NodalField& u_prev,
                            const NodalField& g, const SolverConfig& config,
                            const ConvexSplitting& splitting) {
  require_shapes(mesh, u, u_prev, "gk_gradient");
  require_shapes(mesh, u, g, "gk_gradient");
  const QuadratureRule& rule = quadrature_rule(config.quad_degree_zero_order);
  const double b = config.b_p();
  const double a = config.a_p();
  const double a2 = a * a;
  const double inv_delta = 1.0 / config.delta;
  const double inv_tau = 1.0 / config.tau;
  const int n = u.n_components;

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(u.values.size());
  Eigen::MatrixXd lu(n, 3), lp(n, 3), lg(n, 3);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& el = mesh.elements[e];
    const auto& geo = mesh.geometry[e];
    gather(mesh, u, e, lu);
    gather(mesh, u_prev, e, lp);
    gather(mesh, g, e, lg);
    const Eigen::MatrixXd gu = local_gradient(mesh, e, lu);
    // Flux of the gradient terms, B = [b + (|G|^2 + a^2)^{(p-2)/2}] G; tested
    // against the hat-function gradients below.
    const Eigen::MatrixXd flux = (b + pterm_c1(gu.squaredNorm() + a2, config.p)) * gu;
    for (int loc = 0; loc < 3; ++loc)
      grad.segment(static_cast<Eigen::Index>(el[loc]) * n, n).noalias() +=
          geo.area * (flux * geo.shape_gradients[loc]);
    for (int q = 0; q < rule.num_points(); ++q) {
      const double w = geo.area * rule.weights[q];
      const Eigen::VectorXd uq = lu * rule.points[q];
      const Eigen::VectorXd pq = lp * rule.points[q];
      Eigen::VectorXd z = inv_tau * (uq - pq) +
                          inv_delta * (splitting.w_plus_grad(uq) - splitting.w_minus_grad(pq));
      if (config.lambda != 0.0) z.noalias() += config.lambda * (uq - lg * rule.points[q]);
      for (int loc = 0; loc < 3; ++loc)
        grad.segment(static_cast<Eigen::Index>(el[loc]) * n, n).noalias() +=
            (w * rule.points[q][loc]) * z;
    }
  }
  return grad;
}

Eigen::SparseMatrix<double> gk_hessian(const TriMesh& mesh, const NodalField& u,
                                       const NodalField& u_prev, const NodalField& g,
                                       const SolverConfig& config,
                                       const ConvexSplitting& splitting) {
  require_shapes(mesh, u, u_prev, "gk_hessian");
  require_shapes(mesh, u, g, "gk_hessian");
  const QuadratureRule& rule = quadrature_rule(config.quad_degree_zero_order);
  const double b = config.b_p();
  const double a = config.a_p();
  const double a2 = a * a;
  const double inv_delta = 1.0 / config.delta;
  const double inv_tau = 1.0 / config.tau;
  const int n = u.n_components;

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.num_elements()) * 9 * n * n);

  Eigen::MatrixXd lu(n, 3);
  Eigen::MatrixXd block(n, n);
  std::array<Eigen::VectorXd, 3> gdir;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& el = mesh.elements[e];
    const auto& geo = mesh.geometry[e];
    gather(mesh, u, e, lu);
    const Eigen::MatrixXd gu = local_gradient(mesh, e, lu);
    const double s = gu.squaredNorm() + a2;
    const double c1 = b + pterm_c1(s, config.p);
    const double c2 = pterm_c2(s, config.p);
    for (int loc = 0; loc < 3; ++loc) gdir[loc] = gu * geo.shape_gradients[loc];

    // Zero-order contributions are quadratic forms in the shape values, so
    // each quadrature point adds lam_i lam_j times a fixed n x n matrix.
    Eigen::MatrixXd elem = Eigen::MatrixXd::Zero(3 * n, 3 * n);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        block.noalias() = (geo.area * c2) * (gdir[i] * gdir[j].transpose());
        block.diagonal().array() +=
            geo.area * c1 * geo.shape_gradients[i].dot(geo.shape_gradients[j]);
        elem.block(i * n, j * n, n, n) = block;
      }
    for (int q = 0; q < rule.num_points(); ++q) {
      const double w = geo.area * rule.weights[q];
      const Eigen::VectorXd uq = lu * rule.points[q];
      Eigen::MatrixXd zmat = inv_delta * splitting.w_plus_hess(uq);
      zmat.diagonal().array() += inv_tau + config.lambda;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          elem.block(i * n, j * n, n, n) +=
              (w * (rule.points[q][i] * rule.points[q][j])) * zmat;
    }
    // The (i,j) and (j,i) blocks are transposes mathematically, but the
    // product kernels above do not guarantee bitwise-transposed results.
    // Mirror the upper triangle so the assembled matrix is exactly symmetric.
    elem = elem.selfadjointView<Eigen::Upper>();

    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int r = 0; r < n; ++r)
          for (int c = 0; c < n; ++c)
            triplets.emplace_back(el[i] * n + r, el[j] * n + c, elem(i * n + r, j * n + c));
  }

  Eigen::SparseMatrix<double> hessian(u.values.size(), u.values.size());
  hessian.setFromTriplets(triplets.begin(), triplets.end());
  return hessian;
}

}  // namespace pharmonic
