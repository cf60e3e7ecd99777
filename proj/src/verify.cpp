#include "ofgc/verify.hpp"

#include <cmath>

#include "ofgc/curve.hpp"
#include "ofgc/penalty.hpp"

namespace ofgc {

namespace {

bool analytic_jets(const MetricSpec& m) {
  switch (m.kind) {
    case MetricKind::euclidean:
    case MetricKind::pnorm:
      return true;
    case MetricKind::riemannian:
      return m.conformal.has_value() || !m.g_fn;
    case MetricKind::randers:
      return !m.beta_fn;
    case MetricKind::analytic:
      return static_cast<bool>(m.jets.dqG) && static_cast<bool>(m.jets.dvG);
  }
  return false;
}

struct SampleSet {
  std::vector<std::pair<Vec, Vec>> pts;
  int skipped = 0;
};

// Draw (q, v) samples usable for jets; p-norm samples too close to a
// coordinate hyperplane are counted and skipped.
SampleSet draw_samples(const MetricSpec& metric, const ImplicitDomain& domain, int count,
                       Rng& rng) {
  SampleSet out;
  const RegionSampler sampler = make_strip_sampler(domain);
  int guard = 0;
  while (static_cast<int>(out.pts.size()) < count && guard < 100 * count) {
    ++guard;
    auto [q, v] = sampler(rng);
    if (metric.kind == MetricKind::pnorm) {
      bool near_plane = false;
      for (int i = 0; i < v.size(); ++i)
        if (std::abs(v[i]) < 1e-3 * v.norm()) near_plane = true;
      if (near_plane) {
        ++out.skipped;
        continue;
      }
    }
    out.pts.emplace_back(std::move(q), std::move(v));
  }
  return out;
}

}  // namespace

bool all_pass(const std::vector<CheckRow>& rows) {
  for (const CheckRow& r : rows)
    if (!r.pass) return false;
  return true;
}

std::vector<CheckRow> run_invariant_suite(const MetricSpec& metric,
                                          const ImplicitDomain& domain, std::uint64_t seed) {
  std::vector<CheckRow> rows;
  Rng rng(seed);
  const bool analytic = analytic_jets(metric);
  const double euler_tol = analytic ? 1e-6 : kEulerTolFiniteDiff;
  const SampleSet samples = draw_samples(metric, domain, 100, rng);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  {  // F(q, s v) = s F(q, v)
    CheckRow row{"homogeneity", true, 0.0, 1e-10, static_cast<int>(samples.pts.size()),
                 samples.skipped};
    for (const auto& [q, v] : samples.pts) {
      const double s = 10.0 * unif(rng) + 1e-3;
      const double f = eval_F(metric, q, v);
      row.worst = std::max(row.worst,
                           std::abs(eval_F(metric, q, Vec(s * v)) - s * f) / (s * f));
    }
    row.pass = row.worst <= row.tol;
    rows.push_back(row);
  }

  {  // dvG . v = 2G and v . dvvG v = 2G
    CheckRow row{"euler_identities", true, 0.0, euler_tol,
                 static_cast<int>(samples.pts.size()), samples.skipped};
    for (const auto& [q, v] : samples.pts) {
      const MetricJet jet = metric_jet(metric, q, v);
      const double e1 = std::abs(jet.dvG.dot(v) - 2.0 * jet.G) / (2.0 * jet.G);
      const double e2 = std::abs(v.dot(jet.dvvG * v) - 2.0 * jet.G) / (2.0 * jet.G);
      row.worst = std::max({row.worst, e1, e2});
    }
    row.pass = row.worst <= row.tol;
    rows.push_back(row);
  }

  {  // fundamental tensor positive definite
    CheckRow row{"tensor_positive", true, 0.0, 0.0, static_cast<int>(samples.pts.size()),
                 samples.skipped};
    double min_eig = std::numeric_limits<double>::infinity();
    for (const auto& [q, v] : samples.pts) {
      Eigen::SelfAdjointEigenSolver<Mat> eig(fundamental_tensor(metric, q, v));
      min_eig = std::min(min_eig, eig.eigenvalues().minCoeff());
    }
    row.worst = min_eig;
    row.pass = min_eig > 0.0;
    rows.push_back(row);
  }

  {  // spray(q, 2v) = 4 spray(q, v)
    CheckRow row{"spray_homogeneity", true, 0.0, analytic ? 1e-6 : 1e-3,
                 static_cast<int>(samples.pts.size()), samples.skipped};
    for (const auto& [q, v] : samples.pts) {
      const Vec s1 = spray(metric, q, v);
      const Vec s2 = spray(metric, q, Vec(2.0 * v));
      row.worst = std::max(row.worst, (s2 - 4.0 * s1).norm() / (1.0 + 4.0 * s1.norm()));
    }
    row.pass = row.worst <= row.tol;
    rows.push_back(row);
  }

  if (analytic) {  // closed-form first derivatives vs central differences
    CheckRow row{"grad_vs_finite_difference", true, 0.0, 1e-4,
                 static_cast<int>(samples.pts.size()), samples.skipped};
    const double h = 1e-5;
    for (const auto& [q, v] : samples.pts) {
      const FirstOrderJet jet = metric_grad(metric, q, v);
      Vec fd_q(q.size()), fd_v(q.size());
      Vec qp = q, vp = v;
      for (int i = 0; i < q.size(); ++i) {
        qp[i] = q[i] + h;
        const double gp = eval_G(metric, qp, v);
        qp[i] = q[i] - h;
        const double gm = eval_G(metric, qp, v);
        qp[i] = q[i];
        fd_q[i] = (gp - gm) / (2.0 * h);
        vp[i] = v[i] + h;
        const double hp = eval_G(metric, q, vp);
        vp[i] = v[i] - h;
        const double hm = eval_G(metric, q, vp);
        vp[i] = v[i];
        fd_v[i] = (hp - hm) / (2.0 * h);
      }
      const double scale = 1.0 + jet.dvG.norm() + jet.dqG.norm();
      row.worst = std::max(row.worst, ((jet.dqG - fd_q).norm() + (jet.dvG - fd_v).norm()) / scale);
    }
    row.pass = row.worst <= row.tol;
    rows.push_back(row);
  }

  // Chord seeds can cross coordinate hyperplanes, where p-norm jets are
  // refused; the gradient consistency check is skipped for that kind.
  if (metric.kind != MetricKind::pnorm) {  // dJ[xi] against finite differences of J
    CheckRow row{"energy_gradient_consistency", true, 0.0, 1e-5, 50, 0};
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      const Vec a = boundary_project(domain, sample_band(domain, rng));
      const Vec b = boundary_project(domain, sample_band(domain, rng));
      if ((a - b).norm() < 0.2) {
        --trial;
        continue;
      }
      DiscreteCurve c = chord_seed(domain, a, b, 16);
      // shrink toward the center so wiggled nodes stay strictly inside
      for (int k = 0; k <= c.segments(); ++k)
        c.nodes.col(k) = domain.star_center + 0.9 * (c.node(k) - domain.star_center);
      Mat xi(c.dim(), c.segments() + 1);
      for (int i = 0; i < xi.size(); ++i) xi.data()[i] = gauss(rng);
      xi *= 0.01 / (1.0 + xi.norm());
      const double j0 = energy(metric, c);
      const Mat grad = energy_gradient(metric, c);
      const double h = 1e-6;
      DiscreteCurve cp = c, cm = c;
      cp.nodes += h * xi;
      cm.nodes -= h * xi;
      const double fd = (energy(metric, cp) - energy(metric, cm)) / (2.0 * h);
      const double an = (grad.array() * xi.array()).sum();
      row.worst = std::max(row.worst, std::abs(fd - an) / (1.0 + std::abs(j0)));
    }
    row.pass = row.worst <= row.tol;
    rows.push_back(row);
  }

  {  // chi'(t) t (delta - t) = 2 delta chi(t)
    CheckRow row{"chi_identity", true, 0.0, 1e-10, 100, 0};
    for (int i = 0; i < 100; ++i) {
      const double delta = 1e-3 + unif(rng);
      const double t = delta * (0.01 + 0.98 * unif(rng));
      const double lhs = chi_prime(delta, t) * t * (delta - t);
      const double rhs = 2.0 * delta * chi(delta, t);
      row.worst = std::max(row.worst, std::abs(lhs - rhs) / (std::abs(rhs) + 1e-300));
    }
    row.pass = row.worst <= row.tol;
    rows.push_back(row);
  }

  if (metric.kind != MetricKind::pnorm) {  // G constant along free geodesics
    CheckRow row{"geodesic_energy_conservation", true, 0.0, 1e-8, 5, 0};
    for (int i = 0; i < 5; ++i) {
      const Vec q0 = domain.star_shaped ? domain.star_center
                                        : Vec(0.5 * (domain.box_lo + domain.box_hi));
      const Vec v0 = random_unit_vector(domain.dimension, rng);
      const Trajectory traj = shoot_geodesic(metric, domain, std::nullopt, q0, v0, 0.3, 1e-3);
      const double g0 = eval_G(metric, traj.positions.front(), traj.velocities.front());
      for (size_t k = 0; k < traj.times.size(); ++k) {
        const double g = eval_G(metric, traj.positions[k], traj.velocities[k]);
        row.worst = std::max(row.worst, std::abs(g - g0) / g0);
      }
    }
    row.pass = row.worst <= row.tol;
    rows.push_back(row);
  }

  {  // reverse is an involution and preserves energy when reversible
    CheckRow row{"reverse_involution", true, 0.0, 1e-12, 20, 0};
    for (int i = 0; i < 20; ++i) {
      const Vec a = boundary_project(domain, sample_band(domain, rng));
      const Vec b = boundary_project(domain, sample_band(domain, rng));
      if ((a - b).norm() < 0.2) {
        --i;
        continue;
      }
      const DiscreteCurve c = chord_seed(domain, a, b, 16);
      const DiscreteCurve rr = reverse(reverse(c));
      row.worst = std::max(row.worst, (rr.nodes - c.nodes).cwiseAbs().maxCoeff());
      if (metric.declared_reversible && metric.kind != MetricKind::pnorm) {
        const double j1 = energy(metric, c);
        const double j2 = energy(metric, reverse(c));
        row.worst = std::max(row.worst, std::abs(j1 - j2) / (1.0 + j1));
      }
    }
    row.pass = row.worst <= row.tol;
    rows.push_back(row);
  }

  {  // projections are idempotent
    CheckRow row{"projection_idempotent", true, 0.0, 1e-9, 50, 0};
    for (int i = 0; i < 50; ++i) {
      const Vec q = boundary_project(domain, sample_band(domain, rng));
      const Vec q2 = boundary_project(domain, q);
      row.worst = std::max(row.worst, (q2 - q).norm());
      const Vec w = random_unit_vector(domain.dimension, rng);
      const Vec t1 = tangent_project(domain, q, w);
      const Vec t2 = tangent_project(domain, q, t1);
      row.worst = std::max(row.worst, (t2 - t1).norm());
    }
    row.pass = row.worst <= row.tol;
    rows.push_back(row);
  }

  return rows;
}

}  // namespace ofgc
