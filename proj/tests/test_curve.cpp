#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ofgc/curve.hpp"

using namespace ofgc;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("energy of straight chords") {
  const MetricSpec eu = MetricSpec::euclidean(2);
  for (int n : {8, 16, 64}) {
    const DiscreteCurve c = line_curve(vec({-1, 0}), vec({1, 0}), n);
    CHECK(energy(eu, c) == doctest::Approx(2.0));
  }
  const DiscreteCurve half = line_curve(vec({-0.5, 0}), vec({0.5, 0}), 32);
  CHECK(energy(eu, half) == doctest::Approx(0.5));

  const MetricSpec rd = MetricSpec::randers(vec({1.0 / 3.0, 0}));
  const double fwd = energy(rd, half);
  const double bwd = energy(rd, reverse(half));
  CHECK(fwd / bwd == doctest::Approx(4.0));
  CHECK(fwd == doctest::Approx(0.5 * 16.0 / 9.0));

  // constant curve has zero energy by convention
  const DiscreteCurve constant(Mat::Ones(2, 17));
  CHECK(energy(eu, constant) == 0.0);

  // an interior zero segment in a non-constant curve is an error
  DiscreteCurve broken = line_curve(vec({-1, 0}), vec({1, 0}), 8);
  broken.nodes.col(4) = broken.nodes.col(3);
  CHECK_THROWS_AS(energy(eu, broken), DegenerateCurveError);
}

TEST_CASE("energy gradient against finite differences") {
  const MetricSpec eu = MetricSpec::euclidean(2);
  const DiscreteCurve straight = line_curve(vec({-1, 0}), vec({1, 0}), 16);
  const Mat g = energy_gradient(eu, straight);
  CHECK(g.middleCols(1, 15).norm() < 1e-12);  // discrete geodesic

  DiscreteCurve bent = straight;
  bent.nodes(1, 8) += 0.2;
  const Mat gb = energy_gradient(eu, bent);
  CHECK(gb(1, 8) > 0.0);  // pulls back toward the line
  const double h = 1e-7;
  DiscreteCurve p = bent, m = bent;
  p.nodes(1, 8) += h;
  m.nodes(1, 8) -= h;
  const double fd = (energy(eu, p) - energy(eu, m)) / (2.0 * h);
  CHECK(gb(1, 8) == doctest::Approx(fd).epsilon(1e-6));

  CHECK(energy_gradient(eu, DiscreteCurve(Mat::Zero(2, 9))).norm() == 0.0);
}

TEST_CASE("gradient consistency on random curves") {
  Rng rng(9);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const MetricSpec metrics[] = {MetricSpec::euclidean(2),
                                MetricSpec::randers(vec({0.2, -0.3})),
                                MetricSpec::round_sphere_patch(2, 1.2)};
  for (const MetricSpec& m : metrics) {
    for (int trial = 0; trial < 50; ++trial) {
      Mat nodes(2, 13);
      for (int k = 0; k < 13; ++k)
        nodes.col(k) = 0.5 * random_unit_vector(2, rng) + vec({0.05 * k, 0});
      const DiscreteCurve c(nodes);
      Mat xi(2, 13);
      for (int i = 0; i < xi.size(); ++i) xi.data()[i] = gauss(rng);
      xi /= 1.0 + xi.norm();
      const double j0 = energy(m, c);
      const double h = 1e-6;
      DiscreteCurve cp = c, cm = c;
      cp.nodes += h * xi;
      cm.nodes -= h * xi;
      const double fd = (energy(m, cp) - energy(m, cm)) / (2.0 * h);
      const double an = (energy_gradient(m, c).array() * xi.array()).sum();
      CHECK(std::abs(fd - an) <= 1e-5 * (1.0 + std::abs(j0)));
    }
  }
}

TEST_CASE("star norm and distance") {
  CHECK(star_norm(Mat::Zero(2, 11)) == 0.0);

  Mat constant = Mat::Zero(2, 11);
  constant.row(0).setConstant(0.7);
  CHECK(star_norm(constant) == doctest::Approx(0.7));

  Mat jump = Mat::Zero(2, 11);  // n = 10, single unit jump at the last segment
  jump(0, 10) = 1.0;
  CHECK(star_norm(jump) == doctest::Approx(1.0 + std::sqrt(10.0)));

  const DiscreteCurve c = line_curve(vec({-1, 0}), vec({1, 0}), 10);
  CHECK(star_dist(c, c) == 0.0);

  const DiscreteCurve ca(Mat::Zero(2, 11));
  Mat b = Mat::Zero(2, 11);
  b.row(1).setConstant(0.3);
  CHECK(star_dist(ca, DiscreteCurve(b)) == doctest::Approx(0.3));

  DiscreteCurve shifted = c;
  shifted.nodes.row(1).array() += 0.25;
  CHECK(star_dist(c, shifted) == doctest::Approx(0.25));

  CHECK_THROWS_AS(star_dist(c, line_curve(vec({-1, 0}), vec({1, 0}), 20)),
                  InvalidInputError);
}

TEST_CASE("reversal") {
  const DiscreteCurve c = line_curve(vec({-1, 0.2}), vec({1, -0.1}), 16);
  CHECK((reverse(reverse(c)).nodes - c.nodes).norm() == 0.0);
  const MetricSpec eu = MetricSpec::euclidean(2);
  CHECK(std::abs(energy(eu, reverse(c)) - energy(eu, c)) < 1e-12);

  // reversal is a star_dist isometry
  const DiscreteCurve d = line_curve(vec({-0.9, 0.3}), vec({0.8, 0.4}), 16);
  CHECK(star_dist(reverse(c), reverse(d)) == doctest::Approx(star_dist(c, d)));
}

TEST_CASE("chord seeds through the radial map") {
  const ImplicitDomain ball = make_ball(2, 1.0);
  const DiscreteCurve straight = chord_seed(ball, vec({-1, 0}), vec({1, 0}), 16);
  CHECK((straight.nodes - line_curve(vec({-1, 0}), vec({1, 0}), 16).nodes).norm() < 1e-9);

  const DiscreteCurve constant = chord_seed(ball, vec({0, 1}), vec({0, 1}), 16);
  CHECK(constant.is_constant());
  CHECK(energy(MetricSpec::euclidean(2), constant) == 0.0);
  CHECK(energy_gradient(MetricSpec::euclidean(2), constant).norm() == 0.0);

  const ImplicitDomain ell = make_ellipse(2.0, 1.0);
  const DiscreteCurve axis = chord_seed(ell, vec({2, 0}), vec({-2, 0}), 16);
  for (int k = 1; k < 16; ++k) {
    CHECK(std::abs(axis.nodes(1, k)) < 1e-12);  // stays on the major axis
    CHECK(ell.phi(axis.node(k)) < 0.0);         // strictly inside
  }

  // seed(B, A) = reverse(seed(A, B)) exactly
  const Vec A = boundary_point_2d(ell, 0.6), B = boundary_point_2d(ell, 2.9);
  CHECK((chord_seed(ell, B, A, 32).nodes - reverse(chord_seed(ell, A, B, 32)).nodes).norm() ==
        0.0);

  CHECK_THROWS_AS(chord_seed(ball, vec({0.5, 0}), vec({1, 0}), 16), InvalidInputError);

  ImplicitDomain no_cert = ball;
  no_cert.star_shaped = false;
  CHECK_THROWS_AS(chord_seed(no_cert, vec({-1, 0}), vec({1, 0}), 16),
                  UnsupportedDomainError);

  // continuity of seeds in the endpoints (sampled)
  const DiscreteCurve s0 = chord_seed(ell, A, B, 32);
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const DiscreteCurve s1 =
        chord_seed(ell, boundary_point_2d(ell, 0.6 + eps), boundary_point_2d(ell, 2.9 - eps), 32);
    CHECK(star_dist(s0, s1) < 40.0 * eps);
  }
}

TEST_CASE("family max energy") {
  const MetricSpec eu = MetricSpec::euclidean(2);
  CHECK(family_max_energy(eu, make_ball(2, 1.0), 64, 32) == doctest::Approx(2.0).epsilon(0.02));
  CHECK(family_max_energy(eu, make_ball(2, 0.5), 64, 32) ==
        doctest::Approx(0.5).epsilon(0.02));
  CHECK(family_max_energy(eu, make_ball(2, 1.0), 1, 32) == 0.0);
}

TEST_CASE("constant-speed reparametrization") {
  const MetricSpec eu = MetricSpec::euclidean(2);
  const DiscreteCurve straight = line_curve(vec({-1, 0}), vec({1, 0}), 32);
  CHECK((reparametrize_const_speed(eu, straight).nodes - straight.nodes).norm() < 1e-10);

  // clustered nodes on a straight segment: energy drops to (length)^2 / 2
  Mat clustered(2, 33);
  for (int k = 0; k <= 32; ++k) {
    const double s = static_cast<double>(k) / 32;
    clustered.col(k) = vec({-1.0 + 2.0 * s * s, 0.0});
  }
  const DiscreteCurve lumpy(clustered);
  const DiscreteCurve even = reparametrize_const_speed(eu, lumpy);
  CHECK(energy(eu, lumpy) > 2.0 + 0.1);
  CHECK(energy(eu, even) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(energy(eu, even) <= energy(eu, lumpy));

  // Randers speed constancy along a straight chord
  const MetricSpec rd = MetricSpec::randers(vec({0.25, 0.1}));
  const DiscreteCurve rd_even = reparametrize_const_speed(rd, lumpy);
  double fmin = 1e300, fmax = 0.0;
  for (int k = 0; k < rd_even.segments(); ++k) {
    const double f = eval_F(rd, rd_even.midpoint(k), rd_even.velocity(k));
    fmin = std::min(fmin, f);
    fmax = std::max(fmax, f);
  }
  CHECK((fmax - fmin) / fmax < 1e-3);

  CHECK_THROWS_AS(reparametrize_const_speed(eu, DiscreteCurve(Mat::Zero(2, 9))),
                  DegenerateCurveError);
}

TEST_CASE("quadrature converges at second order on the quarter circle") {
  const MetricSpec eu = MetricSpec::euclidean(2);
  const double exact = M_PI * M_PI / 8.0;  // (pi/2)^2 / 2
  double prev_err = -1.0;
  for (int n : {16, 32, 64, 128}) {
    Mat nodes(2, n + 1);
    for (int k = 0; k <= n; ++k) {
      const double t = 0.5 * M_PI * k / n;
      nodes.col(k) = vec({std::cos(t), std::sin(t)});
    }
    const double err = std::abs(energy(eu, DiscreteCurve(nodes)) - exact);
    if (prev_err > 0.0) CHECK(prev_err / err > 3.5);  // observed order >= 2
    prev_err = err;
  }
}

TEST_CASE("curve CSV round trip is bit exact") {
  Rng rng(17);
  Mat nodes(3, 21);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < nodes.size(); ++i) nodes.data()[i] = gauss(rng);
  const DiscreteCurve c(nodes);
  std::stringstream ss;
  write_curve_csv(ss, c);
  const DiscreteCurve back = read_curve_csv(ss);
  REQUIRE(back.nodes.rows() == c.nodes.rows());
  REQUIRE(back.nodes.cols() == c.nodes.cols());
  for (int i = 0; i < c.nodes.size(); ++i) CHECK(back.nodes.data()[i] == c.nodes.data()[i]);
}
