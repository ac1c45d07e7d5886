// Shared test oracles: an independent quadrature rule, finite-difference
// helpers, and deterministic random field generation. Everything here is
// deliberately written from first principles rather than calling back into
// the code under test.
#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "pharmonic/field.hpp"
#include "pharmonic/mesh.hpp"
#include "pharmonic/rng.hpp"

namespace test_support {

// Radon's 7-point rule, exact for polynomials of total degree <= 5 on a
// triangle. Barycentric points and weights (weights sum to one).
struct RadonRule {
  std::vector<Eigen::Vector3d> points;
  std::vector<double> weights;
};

inline const RadonRule& radon_rule() {
  static const RadonRule rule = [] {
    RadonRule r;
    r.points.emplace_back(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0);
    r.weights.push_back(9.0 / 40.0);
    const double s = std::sqrt(15.0);
    const double a1 = (6.0 - s) / 21.0, w1 = (155.0 - s) / 1200.0;
    const double a2 = (6.0 + s) / 21.0, w2 = (155.0 + s) / 1200.0;
    for (const auto& [a, w] : {std::pair{a1, w1}, std::pair{a2, w2}}) {
      r.points.emplace_back(1.0 - 2.0 * a, a, a);
      r.points.emplace_back(a, 1.0 - 2.0 * a, a);
      r.points.emplace_back(a, a, 1.0 - 2.0 * a);
      r.weights.insert(r.weights.end(), 3, w);
    }
    return r;
  }();
  return rule;
}

// Integral of f over the triangle with the given vertices via the Radon rule.
inline double radon_integrate(const std::array<Eigen::Vector2d, 3>& v,
                              const std::function<double(double, double)>& f) {
  const double twice_area = (v[1] - v[0]).x() * (v[2] - v[0]).y() -
                            (v[1] - v[0]).y() * (v[2] - v[0]).x();
  const RadonRule& rule = radon_rule();
  double acc = 0.0;
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const Eigen::Vector2d x =
        rule.points[q][0] * v[0] + rule.points[q][1] * v[1] + rule.points[q][2] * v[2];
    acc += rule.weights[q] * f(x.x(), x.y());
  }
  return 0.5 * std::abs(twice_area) * acc;
}

// Central finite-difference gradient of a scalar function of a flat vector.
inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd grad(x.size());
  Eigen::VectorXd mod = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    mod[i] = x[i] + h;
    const double plus = f(mod);
    mod[i] = x[i] - h;
    const double minus = f(mod);
    mod[i] = x[i];
    grad[i] = (plus - minus) / (2.0 * h);
  }
  return grad;
}

// Fill every component of the field with uniform draws from [lo, hi].
inline void fill_uniform(pharmonic::NodalField& field, pharmonic::Rng& rng, double lo, double hi) {
  for (Eigen::Index i = 0; i < field.values.size(); ++i)
    field.values[i] = lo + (hi - lo) * rng.uniform();
}

// int_T x^a y^b over the reference triangle {x, y >= 0, x + y <= 1}.
inline double reference_monomial_integral(int a, int b) {
  const auto factorial = [](int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
  };
  return factorial(a) * factorial(b) / factorial(a + b + 2);
}

}  // namespace test_support
