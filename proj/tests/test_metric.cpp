#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ofgc/metric.hpp"

using namespace ofgc;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// Independent central-difference oracles over eval_G only.
Vec oracle_dvG(const MetricSpec& m, const Vec& q, const Vec& v, double h = 1e-6) {
  Vec out(v.size());
  for (int i = 0; i < v.size(); ++i) {
    Vec vp = v, vm = v;
    vp[i] += h;
    vm[i] -= h;
    out[i] = (eval_G(m, q, vp) - eval_G(m, q, vm)) / (2.0 * h);
  }
  return out;
}

Vec oracle_dqG(const MetricSpec& m, const Vec& q, const Vec& v, double h = 1e-6) {
  Vec out(q.size());
  for (int i = 0; i < q.size(); ++i) {
    Vec qp = q, qm = q;
    qp[i] += h;
    qm[i] -= h;
    out[i] = (eval_G(m, qp, v) - eval_G(m, qm, v)) / (2.0 * h);
  }
  return out;
}

Mat oracle_dvvG(const MetricSpec& m, const Vec& q, const Vec& v, double h = 1e-4) {
  Mat out(v.size(), v.size());
  for (int j = 0; j < v.size(); ++j) {
    Vec vp = v, vm = v;
    vp[j] += h;
    vm[j] -= h;
    out.col(j) = (oracle_dvG(m, q, vp, h) - oracle_dvG(m, q, vm, h)) / (2.0 * h);
  }
  return out;
}

// Christoffel symbols of a conformal metric e^{2 phi} I:
// Gamma^i_{jk} = d_j phi delta^i_k + d_k phi delta^i_j - d_i phi delta_jk.
Vec christoffel_accel_conformal(const Vec& dphi, const Vec& v) {
  return -(2.0 * dphi.dot(v) * v - v.squaredNorm() * dphi);
}

}  // namespace

TEST_CASE("F evaluation on the built-in kinds") {
  const MetricSpec eu = MetricSpec::euclidean(2);
  CHECK(eval_F(eu, vec({0, 0}), vec({3, 4})) == doctest::Approx(5.0));
  CHECK(eval_G(eu, vec({0, 0}), vec({3, 4})) == doctest::Approx(25.0));
  CHECK(eval_G(eu, vec({0, 0}), vec({0, 0})) == 0.0);

  const MetricSpec rd = MetricSpec::randers(vec({1.0 / 3.0, 0}));
  CHECK(eval_F(rd, vec({0, 0}), vec({1, 0})) == doctest::Approx(4.0 / 3.0));
  CHECK(eval_G(rd, vec({0, 0}), vec({-1, 0})) == doctest::Approx(4.0 / 9.0));

  const MetricSpec p3 = MetricSpec::pnorm_metric(3, 3.0);
  CHECK(eval_F(p3, Vec::Zero(3), vec({1, 1, 1})) == doctest::Approx(std::cbrt(3.0)));
}

TEST_CASE("input validation") {
  const MetricSpec eu = MetricSpec::euclidean(2);
  Vec bad = vec({1, 0});
  bad[0] = std::nan("");
  CHECK_THROWS_AS(eval_F(eu, vec({0, 0}), bad), InvalidInputError);
  CHECK_THROWS_AS(MetricSpec::randers(vec({1.2, 0})), MetricDegenerateError);
  CHECK_THROWS_AS(MetricSpec::pnorm_metric(2, 2.0), InvalidInputError);

  // field one-form passing |beta| = 1 at the evaluation point
  const MetricSpec rf = MetricSpec::randers(2, [](const Vec& q) {
    return Vec(q[0] * vec({1, 0}));
  });
  CHECK_THROWS_AS(eval_F(rf, vec({1.5, 0}), vec({1, 0})), MetricDegenerateError);
}

TEST_CASE("jets: euclidean closed forms") {
  const MetricSpec eu = MetricSpec::euclidean(2);
  const MetricJet jet = metric_jet(eu, vec({0.3, -0.7}), vec({3, 4}));
  CHECK((jet.dvvG - 2.0 * Mat::Identity(2, 2)).norm() == doctest::Approx(0.0));
  CHECK((jet.dvG - vec({6, 8})).norm() == doctest::Approx(0.0));
  CHECK(jet.dqG.norm() == 0.0);
  CHECK_THROWS_AS(metric_jet(eu, vec({0, 0}), vec({0, 0})), ZeroSectionError);
}

TEST_CASE("jets: randers against the finite-difference oracle") {
  const double beta = 0.25;
  const MetricSpec rd = MetricSpec::randers(vec({beta, 0}));
  const Vec q = vec({0.1, 0.2});

  const MetricJet at_e1 = metric_jet(rd, q, vec({1, 0}));
  const double f1 = (1.0 + beta) * (1.0 + beta);
  CHECK(at_e1.dvG[0] == doctest::Approx(2.0 * f1));
  CHECK(at_e1.dvG[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(at_e1.dvG.dot(vec({1, 0})) == doctest::Approx(2.0 * f1));

  const Vec v = vec({0.6, -1.1});
  const MetricJet jet = metric_jet(rd, q, v);
  CHECK((jet.dvG - oracle_dvG(rd, q, v)).norm() < 1e-7);
  CHECK((jet.dvvG - oracle_dvvG(rd, q, v)).norm() < 1e-5);
  CHECK(jet.dqG.norm() == 0.0);
}

TEST_CASE("jets: p-norm Euler identity and hyperplane guard") {
  const MetricSpec p3 = MetricSpec::pnorm_metric(3, 3.0);
  const Vec v = vec({1, 1, 1});
  const MetricJet jet = metric_jet(p3, Vec::Zero(3), v);
  CHECK(jet.dvG.dot(v) == doctest::Approx(2.0 * std::pow(3.0, 2.0 / 3.0)));
  CHECK((jet.dvG - oracle_dvG(p3, Vec::Zero(3), v)).norm() < 1e-7);
  CHECK((jet.dvvG - oracle_dvvG(p3, Vec::Zero(3), v)).norm() < 1e-5);
  CHECK_THROWS_AS(metric_jet(p3, Vec::Zero(3), vec({1e-12, 1, 1})), SmoothnessBoundaryError);
}

TEST_CASE("jets: conformal sphere patch matches oracles") {
  const MetricSpec sp = MetricSpec::round_sphere_patch(2, 1.0);
  const Vec q = vec({0.3, -0.2});
  const Vec v = vec({0.8, 0.5});
  const MetricJet jet = metric_jet(sp, q, v);
  CHECK((jet.dqG - oracle_dqG(sp, q, v)).norm() < 1e-7 * (1.0 + jet.dqG.norm()));
  CHECK((jet.dvG - oracle_dvG(sp, q, v)).norm() < 1e-7 * (1.0 + jet.dvG.norm()));
  CHECK((jet.dvvG - oracle_dvvG(sp, q, v)).norm() < 1e-5);
}

TEST_CASE("fundamental tensor") {
  const MetricSpec eu = MetricSpec::euclidean(2);
  CHECK((fundamental_tensor(eu, vec({0, 0}), vec({1, 0})) - Mat::Identity(2, 2)).norm() ==
        doctest::Approx(0.0));

  Mat g0(2, 2);
  g0 << 2.0, 0.3, 0.3, 1.0;
  const MetricSpec rm = MetricSpec::riemannian(g0);
  const Mat t1 = fundamental_tensor(rm, vec({0.5, 0.5}), vec({1, 0}));
  const Mat t2 = fundamental_tensor(rm, vec({0.5, 0.5}), vec({-2, 7}));
  CHECK((t1 - g0).norm() == doctest::Approx(0.0));
  CHECK((t1 - t2).norm() == doctest::Approx(0.0));

  const MetricSpec rd = MetricSpec::randers(vec({1.0 / 3.0, 0}));
  const Mat g = fundamental_tensor(rd, vec({0, 0}), vec({0, 1}));
  Eigen::SelfAdjointEigenSolver<Mat> eig(g);
  CHECK(eig.eigenvalues().minCoeff() > 0.0);
  CHECK(g.determinant() > 0.0);
  // homogeneity: g(q, v) v . v = G(q, v)
  CHECK(vec({0, 1}).dot(g * vec({0, 1})) == doctest::Approx(eval_G(rd, vec({0, 0}), vec({0, 1}))));
}

TEST_CASE("spray: flat cases vanish, curved case matches Christoffel oracle") {
  const MetricSpec eu = MetricSpec::euclidean(2);
  CHECK(spray(eu, vec({0.4, 0.1}), vec({1, 2})).norm() == doctest::Approx(0.0));

  const MetricSpec rd = MetricSpec::randers(vec({0.3, 0.1}));
  CHECK(spray(rd, vec({0.4, 0.1}), vec({1, 2})).norm() < 1e-12);

  const MetricSpec sp = MetricSpec::round_sphere_patch(2, 1.0);
  const Vec q = vec({0.3, -0.2});
  const Vec v = vec({0.8, 0.5});
  const Vec dphi = -2.0 / (1.0 + q.squaredNorm()) * q;
  const Vec expected = christoffel_accel_conformal(dphi, v);
  CHECK((spray(sp, q, v) - expected).norm() < 1e-6 * (1.0 + expected.norm()));

  // degree-2 homogeneity
  const Vec s1 = spray(sp, q, v);
  const Vec s2 = spray(sp, q, Vec(2.0 * v));
  CHECK((s2 - 4.0 * s1).norm() < 1e-6 * (1.0 + s1.norm()));
}

TEST_CASE("reversibility detection") {
  Rng rng(7);
  std::vector<std::pair<Vec, Vec>> samples;
  for (int i = 0; i < 32; ++i)
    samples.emplace_back(random_unit_vector(2, rng), random_unit_vector(2, rng));

  const auto [rev_eu, asym_eu] = is_reversible(MetricSpec::euclidean(2), samples);
  CHECK(rev_eu);
  CHECK(asym_eu == 0.0);

  std::vector<std::pair<Vec, Vec>> horizontal{{vec({0, 0}), vec({1, 0})}};
  const auto [rev_rd, asym_rd] =
      is_reversible(MetricSpec::randers(vec({1.0 / 3.0, 0})), horizontal);
  CHECK_FALSE(rev_rd);
  CHECK(asym_rd == doctest::Approx(0.5));

  std::vector<std::pair<Vec, Vec>> samples3;
  for (int i = 0; i < 32; ++i)
    samples3.emplace_back(random_unit_vector(3, rng), random_unit_vector(3, rng));
  const auto [rev_p, asym_p] = is_reversible(MetricSpec::pnorm_metric(3, 3.0), samples3);
  CHECK(rev_p);
  CHECK(asym_p == 0.0);

  CHECK_THROWS_AS(is_reversible(MetricSpec::euclidean(2), {}), InvalidInputError);
}

TEST_CASE("bounds estimation") {
  Rng rng(11);
  const RegionSampler sampler = [](Rng& r) {
    return std::pair<Vec, Vec>{0.5 * random_unit_vector(2, r), random_unit_vector(2, r)};
  };
  const BoundsEstimate eu = estimate_bounds(MetricSpec::euclidean(2), sampler, 100, rng);
  CHECK(eu.ell == doctest::Approx(1.0));
  CHECK(eu.alpha == doctest::Approx(2.0));

  // extremes of F on unit directions are 1 +- beta, so ell must cover both
  // G_max = (1 + beta)^2 and 1 / G_min = 1 / (1 - beta)^2.
  const BoundsEstimate rd =
      estimate_bounds(MetricSpec::randers(vec({1.0 / 3.0, 0})), sampler, 2000, rng);
  CHECK(rd.ell == doctest::Approx(9.0 / 4.0).epsilon(0.01));
  CHECK(rd.alpha > 0.0);

  CHECK_THROWS_AS(estimate_bounds(MetricSpec::euclidean(2), sampler, 0, rng),
                  InvalidInputError);
}

TEST_CASE("positive homogeneity of F over random scalings") {
  Rng rng(3);
  std::uniform_real_distribution<double> unif(1e-3, 10.0);
  const std::vector<MetricSpec> metrics = {
      MetricSpec::euclidean(2), MetricSpec::randers(vec({0.2, -0.3})),
      MetricSpec::round_sphere_patch(2, 1.5)};
  for (const MetricSpec& m : metrics) {
    for (int i = 0; i < 100; ++i) {
      const Vec q = 0.4 * random_unit_vector(2, rng);
      const Vec v = 2.0 * random_unit_vector(2, rng);
      const double lam = unif(rng);
      const double lhs = eval_F(m, q, Vec(lam * v));
      const double rhs = lam * eval_F(m, q, v);
      CHECK(std::abs(lhs - rhs) <= 1e-10 * rhs);
    }
  }
}

TEST_CASE("Euler identities across kinds") {
  Rng rng(5);
  const std::vector<MetricSpec> metrics = {
      MetricSpec::euclidean(3), MetricSpec::randers(vec({0.2, -0.1, 0.15})),
      MetricSpec::round_sphere_patch(3, 1.0), MetricSpec::pnorm_metric(3, 3.0)};
  for (const MetricSpec& m : metrics) {
    for (int i = 0; i < 100; ++i) {
      const Vec q = 0.3 * random_unit_vector(3, rng);
      Vec v = random_unit_vector(3, rng);
      if (m.kind == MetricKind::pnorm) {
        bool bad = false;
        for (int k = 0; k < 3; ++k)
          if (std::abs(v[k]) < 1e-3) bad = true;
        if (bad) {
          --i;
          continue;
        }
      }
      const MetricJet jet = metric_jet(m, q, v);
      CHECK(std::abs(jet.dvG.dot(v) - 2.0 * jet.G) <= 1e-6 * 2.0 * jet.G);
      CHECK(std::abs(v.dot(jet.dvvG * v) - 2.0 * jet.G) <= 1e-6 * 2.0 * jet.G);
    }
  }
}
