#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ofgc/domain.hpp"

using namespace ofgc;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("boundary projection on the unit ball") {
  const ImplicitDomain ball = make_ball(2, 1.0, 0.4);
  const Vec q = vec({0.5, 0.0});
  const Vec p = boundary_project(ball, q);
  CHECK((p - vec({1.0, 0.0})).norm() < 1e-9);  // radial fixed point q / |q|
  CHECK(std::abs(ball.phi(p)) <= ball.tol_phi());

  const Vec already = vec({0.0, 1.0});
  CHECK((boundary_project(ball, already) - already).norm() == 0.0);

  CHECK_THROWS_AS(boundary_project(ball, vec({1.8, 0.0})), OutsideStripError);

  // idempotence
  Rng rng(1);
  for (int i = 0; i < 25; ++i) {
    const Vec x = boundary_project(ball, sample_band(ball, rng));
    CHECK((boundary_project(ball, x) - x).norm() < ball.tol_phi());
  }
}

TEST_CASE("tangential projection on the unit circle") {
  const ImplicitDomain ball = make_ball(2, 1.0);
  CHECK((tangent_project(ball, vec({1, 0}), vec({1, 1})) - vec({0, 1})).norm() < 1e-14);
  CHECK(tangent_project(ball, vec({0, 1}), vec({0, -3})).norm() < 1e-14);
  CHECK((tangent_project(ball, vec({1, 0}), vec({0, 2})) - vec({0, 2})).norm() < 1e-14);
  CHECK_THROWS_AS(tangent_project(ball, vec({0.5, 0}), vec({1, 0})), InvalidInputError);

  // projection property: applying twice equals applying once
  Rng rng(2);
  for (int i = 0; i < 25; ++i) {
    const Vec q = boundary_project(ball, sample_band(ball, rng));
    const Vec w = random_unit_vector(2, rng);
    const Vec t1 = tangent_project(ball, q, w);
    CHECK((tangent_project(ball, q, t1) - t1).norm() < 1e-12);
  }
}

TEST_CASE("Finsler Hessian of phi") {
  const MetricSpec eu = MetricSpec::euclidean(2);
  const ImplicitDomain ball = make_ball(2, 1.0);
  CHECK(finsler_hessian(eu, ball, vec({1, 0}), vec({0, 1})) == doctest::Approx(1.0));

  const ImplicitDomain ell = make_ellipse(2.0, 1.0);
  CHECK(finsler_hessian(eu, ell, vec({2, 0}), vec({0, 1})) == doctest::Approx(1.0));
  CHECK(finsler_hessian(eu, ell, vec({0, 1}), vec({1, 0})) == doctest::Approx(0.25));

  // constant-coefficient Randers has straight-line geodesics, so the spray
  // term vanishes and the value matches the Euclidean one.
  const MetricSpec rd = MetricSpec::randers(vec({0.3, 0.0}));
  CHECK(finsler_hessian(rd, ball, vec({1, 0}), vec({0, 1})) == doctest::Approx(1.0));

  // quadratic metric with zero spray reduces to v . Hess(phi) v
  Mat g0(2, 2);
  g0 << 1.5, 0.2, 0.2, 0.9;
  const MetricSpec rm = MetricSpec::riemannian(g0);
  const double h = finsler_hessian(rm, ell, vec({0, 1}), vec({1, 0}));
  CHECK(h == doctest::Approx(0.25).epsilon(1e-8));
}

TEST_CASE("domain constants of the unit ball") {
  const MetricSpec eu = MetricSpec::euclidean(2);
  const ImplicitDomain ball = make_ball(2, 1.0, 0.25);
  BoundsEstimate bounds;
  bounds.ell = 1.0;
  const DomainConstants c = domain_constants(eu, ball, bounds, 20000, 42);
  CHECK(c.K0 == doctest::Approx(std::sqrt(1.5)).epsilon(0.005));
  CHECK(c.delta_m == doctest::Approx(0.0625 / 3.0).epsilon(0.01));

  ImplicitDomain zero_band = ball;
  zero_band.delta0 = 0.0;
  CHECK_THROWS_AS(domain_constants(eu, zero_band, bounds, 100, 42), InvalidInputError);

  BoundsEstimate doubled = bounds;
  doubled.ell = 2.0;
  const DomainConstants c2 = domain_constants(eu, ball, doubled, 20000, 42);
  CHECK(c2.delta_m == doctest::Approx(0.5 * c.delta_m));
}

TEST_CASE("convexity scan") {
  const MetricSpec eu = MetricSpec::euclidean(2);

  const ConvexityScan ball_scan = convexity_scan(eu, make_ball(2, 1.0), 1000, 42);
  CHECK(ball_scan.min_H >= 1.0 - 1e-3);
  CHECK(ball_scan.min_H <= 1.0 + 1e-6);

  const ConvexityScan ell_scan = convexity_scan(eu, make_ellipse(2.0, 1.0), 4000, 42);
  CHECK(ell_scan.min_H == doctest::Approx(0.25).epsilon(0.01));
  // flattest spot is the minor-axis vertex (0, +-1), tangent e1
  CHECK(std::abs(ell_scan.location[0]) < 0.2);
  CHECK(std::abs(std::abs(ell_scan.location[1]) - 1.0) < 0.05);

  const ImplicitDomain pea = make_peanut();
  const ConvexityScan pea_scan = convexity_scan(eu, pea, 4000, 42);
  CHECK(pea_scan.min_H < 0.0);

  // straight-line second-difference oracle at the found spot
  const Vec q = pea_scan.location, v = pea_scan.direction;
  const double h = 1e-4;
  const double second =
      (pea.phi(q + h * v) - 2.0 * pea.phi(q) + pea.phi(q - h * v)) / (h * h);
  CHECK(second == doctest::Approx(pea_scan.min_H).epsilon(1e-4));
  CHECK(second < 0.0);
}

TEST_CASE("peanut band is clean and the neck is where expected") {
  const ImplicitDomain pea = make_peanut();
  // interior critical point of phi sits below the band
  CHECK(pea.phi(Vec::Zero(2)) < -pea.delta0);
  // neck point (0, y0): phi = 0 exactly at y0 = sqrt(r^2 + blend^2 - sep^2)
  const double y0 = std::sqrt(0.8 * 0.8 + 0.39 * 0.39 - 0.7 * 0.7);
  CHECK(pea.phi(vec({0.0, y0})) == doctest::Approx(0.0).epsilon(1e-12));
  // gradient nonzero across the band (sampled)
  Rng rng(3);
  for (int i = 0; i < 2000; ++i)
    CHECK(pea.grad_phi(sample_band(pea, rng)).norm() > 1e-6);
}

TEST_CASE("finite-difference check of built-in gradients and Hessians") {
  Rng rng(4);
  for (const ImplicitDomain& d :
       {make_ball(2, 0.5), make_ellipse(2.0, 1.0), make_peanut()}) {
    for (int i = 0; i < 50; ++i) {
      const Vec q = sample_band(d, rng);
      const double h = 1e-6;
      Vec fd_grad(2);
      for (int k = 0; k < 2; ++k) {
        Vec qp = q, qm = q;
        qp[k] += h;
        qm[k] -= h;
        fd_grad[k] = (d.phi(qp) - d.phi(qm)) / (2.0 * h);
      }
      CHECK((d.grad_phi(q) - fd_grad).norm() < 1e-7 * (1.0 + fd_grad.norm()));
      Mat fd_hess(2, 2);
      for (int k = 0; k < 2; ++k) {
        Vec qp = q, qm = q;
        qp[k] += h;
        qm[k] -= h;
        fd_hess.col(k) = (d.grad_phi(qp) - d.grad_phi(qm)) / (2.0 * h);
      }
      CHECK((d.hess_phi(q) - fd_hess).norm() < 1e-6 * (1.0 + fd_hess.norm()));
    }
  }
}

TEST_CASE("ray parametrization of star-shaped boundaries") {
  const ImplicitDomain ell = make_ellipse(2.0, 1.0);
  CHECK((boundary_point_2d(ell, 0.0) - vec({2, 0})).norm() < 1e-10);
  CHECK((boundary_point_2d(ell, M_PI / 2) - vec({0, 1})).norm() < 1e-10);

  const ImplicitDomain pea = make_peanut();
  for (int i = 0; i < 64; ++i) {
    const Vec p = boundary_point_2d(pea, 2.0 * M_PI * i / 64);
    CHECK(std::abs(pea.phi(p)) < 1e-10);
  }
}
