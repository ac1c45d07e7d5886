#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "pharmonic/errors.hpp"
#include "pharmonic/field.hpp"
#include "pharmonic/mesh.hpp"
#include "pharmonic/presets.hpp"
#include "pharmonic/rng.hpp"
#include "pharmonic/sphere.hpp"
#include "support/oracles.hpp"

using namespace pharmonic;

TEST_CASE("projection renormalizes nodes and counts fallbacks") {
  const TriMesh mesh = build_rect_mesh(3, 3);
  NodalField u(mesh.num_nodes(), 3);
  Rng rng(6);
  test_support::fill_uniform(u, rng, -2.0, 2.0);
  u.node(5).setZero();  // forces the fallback

  const Eigen::Vector3d pole(0, 0, 1);
  const ProjectionResult proj = project_to_sphere(u, pole);
  CHECK(proj.fallback_count == 1);
  for (int i = 0; i < mesh.num_nodes(); ++i)
    CHECK(proj.field.node(i).norm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(proj.field.node(5) == pole);

  CHECK_THROWS_AS(project_to_sphere(u, Eigen::Vector3d(0, 0, 2)), std::invalid_argument);
  CHECK_THROWS_AS(project_to_sphere(u, Eigen::Vector2d(1, 0)), std::invalid_argument);
}

TEST_CASE("constraint report closed forms") {
  const TriMesh mesh = build_rect_mesh(3, 2);  // unit square
  const double delta = 0.04;

  SUBCASE("unit field reports zero violation") {
    const NodalField u = NodalField::constant(mesh.num_nodes(), Eigen::Vector3d(1, 0, 0));
    const ConstraintReport rep = constraint_report(mesh, u, delta);
    CHECK(rep.l2_violation == 0.0);
    CHECK(rep.linf_nodal_violation == 0.0);
    CHECK(rep.scaled_violation == 0.0);
  }

  SUBCASE("constant modulus sqrt(2)") {
    const NodalField u =
        NodalField::constant(mesh.num_nodes(), std::sqrt(2.0) * Eigen::Vector3d(0, 0, 1));
    const ConstraintReport rep = constraint_report(mesh, u, delta);
    // | |u|^2 - 1 | = 1 everywhere, so the L2 violation is sqrt(area) = 1.
    CHECK(rep.l2_violation == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(rep.linf_nodal_violation == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-14));
    CHECK(rep.scaled_violation == doctest::Approx(1.0 / std::sqrt(delta)).epsilon(1e-13));
  }
}

TEST_CASE("wedge product identities") {
  Rng rng(8);
  SUBCASE("two components") {
    const Eigen::VectorXd e1 = Eigen::Vector2d(1, 0), e2 = Eigen::Vector2d(0, 1);
    REQUIRE(wedge(e1, e2).size() == 1);
    CHECK(wedge(e1, e2)[0] == 1.0);
  }
  SUBCASE("three components reduces to the cross product") {
    for (int i = 0; i < 20; ++i) {
      Eigen::Vector3d a, b;
      for (int c = 0; c < 3; ++c) {
        a[c] = 2.0 * rng.uniform() - 1.0;
        b[c] = 2.0 * rng.uniform() - 1.0;
      }
      const Eigen::VectorXd w = wedge(a, b);
      REQUIRE(w.size() == 3);
      CHECK((w - a.cross(b)).norm() <= 1e-15);
      CHECK((wedge(b, a) + w).norm() == 0.0);  // antisymmetry
      // Lagrange identity |a ^ b|^2 = |a|^2 |b|^2 - (a . b)^2.
      CHECK(w.squaredNorm() == doctest::Approx(a.squaredNorm() * b.squaredNorm() -
                                               a.dot(b) * a.dot(b))
                                   .epsilon(1e-12));
    }
  }
}

TEST_CASE("orthogonality defect closed form for a radially scaled constant") {
  const TriMesh mesh = build_rect_mesh(4, 4);  // unit square
  const double tau = 0.05;
  const Eigen::Vector3d c = 0.5 * Eigen::Vector3d(0.6, 0.8, 0.0);
  const double s = 0.3;
  const NodalField u_prev = NodalField::constant(mesh.num_nodes(), c);
  const NodalField u = NodalField::constant(mesh.num_nodes(), (1.0 + s) * c);

  // ((u - u_prev)/tau . u)^2 = s^2 (1+s)^2 |c|^4 / tau^2, constant in space.
  const double c4 = std::pow(c.squaredNorm(), 2);
  const double expected = s * s * (1.0 + s) * (1.0 + s) * c4 / (tau * tau);
  CHECK(orthogonality_defect(mesh, u, u_prev, tau) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(orthogonality_defect(mesh, u, u, tau) == 0.0);
}

TEST_CASE("orthogonality defect scales like the fourth power of a rotation angle") {
  const TriMesh mesh = build_rect_mesh(2, 2);
  const double tau = 0.1;
  const NodalField u_prev = NodalField::constant(mesh.num_nodes(), Eigen::Vector3d(1, 0, 0));

  std::vector<double> log_theta, log_defect;
  for (const double theta : {0.4, 0.2, 0.1, 0.05}) {
    const NodalField u = NodalField::constant(
        mesh.num_nodes(), Eigen::Vector3d(std::cos(theta), std::sin(theta), 0.0));
    const double defect = orthogonality_defect(mesh, u, u_prev, tau);
    // Exact value (1 - cos theta)^2 / tau^2 for a rigid rotation.
    const double exact = std::pow(1.0 - std::cos(theta), 2) / (tau * tau);
    CHECK(defect == doctest::Approx(exact).epsilon(1e-11));
    log_theta.push_back(std::log(theta));
    log_defect.push_back(std::log(defect));
  }

  // Least-squares slope of log defect against log theta.
  const auto mean = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    return m / static_cast<double>(v.size());
  };
  const double mx = mean(log_theta), my = mean(log_defect);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < log_theta.size(); ++i) {
    num += (log_theta[i] - mx) * (log_defect[i] - my);
    den += (log_theta[i] - mx) * (log_theta[i] - mx);
  }
  CHECK(std::abs(num / den - 4.0) <= 0.1);
}

TEST_CASE("presets produce unit fields deterministically") {
  const TriMesh mesh = build_rect_mesh(6, 6);
  for (const char* name : {"constant", "smoothed-vortex", "random-unit"}) {
    for (const int n : {2, 3}) {
      const NodalField u = make_preset(name, mesh, n, 9);
      CHECK(u.n_components == n);
      for (int i = 0; i < mesh.num_nodes(); ++i)
        CHECK(u.node(i).norm() == doctest::Approx(1.0).epsilon(1e-13));
      const NodalField again = make_preset(name, mesh, n, 9);
      CHECK(u.values == again.values);
    }
  }
  const NodalField a = make_preset("random-unit", mesh, 3, 1);
  const NodalField b = make_preset("random-unit", mesh, 3, 2);
  CHECK(a.values != b.values);
  CHECK_THROWS_AS(make_preset("vortex", mesh, 3, 1), ConfigError);
  CHECK_THROWS_AS(make_preset("constant", mesh, 4, 1), ConfigError);
}
