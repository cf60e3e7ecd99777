#include "ofgc/metric.hpp"

#include <cmath>

namespace ofgc {

namespace {

void check_finite(const Vec& q, const Vec& v) {
  if (!q.allFinite() || !v.allFinite()) throw InvalidInputError("non-finite (q, v)");
}

void check_nonzero(const Vec& v) {
  if (v.norm() == 0.0) throw ZeroSectionError("derivative requested at v = 0");
}

Mat base_matrix(const MetricSpec& m) {
  if (m.base_g.size() > 0) return m.base_g;
  return Mat::Identity(m.dimension, m.dimension);
}

Vec beta_at(const MetricSpec& m, const Vec& q) {
  return m.beta_fn ? m.beta_fn(q) : m.beta_const;
}

void check_randers_positive(const MetricSpec& m, const Vec& q) {
  const Vec b = beta_at(m, q);
  const Mat a = base_matrix(m);
  const double base_norm = std::sqrt(b.dot(a.llt().solve(b)));
  if (!(base_norm < 1.0))
    throw MetricDegenerateError("Randers one-form has base norm >= 1 at q");
}

Mat riemannian_matrix(const MetricSpec& m, const Vec& q) {
  if (m.conformal) {
    const double f = std::exp(2.0 * m.conformal->phi(q));
    return f * Mat::Identity(m.dimension, m.dimension);
  }
  if (m.g_fn) return m.g_fn(q);
  return m.g_const;
}

void check_pnorm_smooth(const MetricSpec& m, const Vec& v) {
  const double scale = kPnormHyperplaneTol * v.norm();
  for (int i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) < scale)
      throw SmoothnessBoundaryError("p-norm jet too close to a coordinate hyperplane");
  (void)m;
}

// Central differences of G in q; step per jet_step().
Vec fd_dqG(const MetricSpec& m, const Vec& q, const Vec& v) {
  const double h = jet_step(v);
  Vec out(m.dimension);
  Vec qp = q;
  for (int i = 0; i < m.dimension; ++i) {
    qp[i] = q[i] + h;
    const double gp = eval_G(m, qp, v);
    qp[i] = q[i] - h;
    const double gm = eval_G(m, qp, v);
    qp[i] = q[i];
    out[i] = (gp - gm) / (2.0 * h);
  }
  return out;
}

Vec fd_dvG(const MetricSpec& m, const Vec& q, const Vec& v) {
  const double h = jet_step(v);
  Vec out(m.dimension);
  Vec vp = v;
  for (int i = 0; i < m.dimension; ++i) {
    vp[i] = v[i] + h;
    const double gp = eval_G(m, q, vp);
    vp[i] = v[i] - h;
    const double gm = eval_G(m, q, vp);
    vp[i] = v[i];
    out[i] = (gp - gm) / (2.0 * h);
  }
  return out;
}

Mat fd_dvvG(const MetricSpec& m, const Vec& q, const Vec& v) {
  const double h = jet_step(v);
  const int n = m.dimension;
  Mat out(n, n);
  const double g0 = eval_G(m, q, v);
  Vec vp = v;
  for (int i = 0; i < n; ++i) {
    vp[i] = v[i] + h;
    const double gp = eval_G(m, q, vp);
    vp[i] = v[i] - h;
    const double gm = eval_G(m, q, vp);
    vp[i] = v[i];
    out(i, i) = (gp - 2.0 * g0 + gm) / (h * h);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      Vec w = v;
      w[i] += h;
      w[j] += h;
      const double gpp = eval_G(m, q, w);
      w[j] -= 2.0 * h;
      const double gpm = eval_G(m, q, w);
      w[i] -= 2.0 * h;
      const double gmm = eval_G(m, q, w);
      w[j] += 2.0 * h;
      const double gmp = eval_G(m, q, w);
      out(i, j) = out(j, i) = (gpp - gpm - gmp + gmm) / (4.0 * h * h);
    }
  }
  return 0.5 * (out + out.transpose());
}

Mat fd_dqqG(const MetricSpec& m, const Vec& q, const Vec& v) {
  const double h = jet_step(v);
  const int n = m.dimension;
  Mat out(n, n);
  const double g0 = eval_G(m, q, v);
  Vec qp = q;
  for (int i = 0; i < n; ++i) {
    qp[i] = q[i] + h;
    const double gp = eval_G(m, qp, v);
    qp[i] = q[i] - h;
    const double gm = eval_G(m, qp, v);
    qp[i] = q[i];
    out(i, i) = (gp - 2.0 * g0 + gm) / (h * h);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      Vec w = q;
      w[i] += h;
      w[j] += h;
      const double gpp = eval_G(m, w, v);
      w[j] -= 2.0 * h;
      const double gpm = eval_G(m, w, v);
      w[i] -= 2.0 * h;
      const double gmm = eval_G(m, w, v);
      w[j] += 2.0 * h;
      const double gmp = eval_G(m, w, v);
      out(i, j) = out(j, i) = (gpp - gpm - gmp + gmm) / (4.0 * h * h);
    }
  }
  return 0.5 * (out + out.transpose());
}

// dqvG(i, j) = d/dq_i of dvG_j, by central differences of dvG in q.
Mat fd_dqvG(const MetricSpec& m, const Vec& q, const Vec& v,
            const std::function<Vec(const Vec&)>& dvG_of_q) {
  const double h = jet_step(v);
  const int n = m.dimension;
  Mat out(n, n);
  Vec qp = q;
  for (int i = 0; i < n; ++i) {
    qp[i] = q[i] + h;
    const Vec gp = dvG_of_q(qp);
    qp[i] = q[i] - h;
    const Vec gm = dvG_of_q(qp);
    qp[i] = q[i];
    out.row(i) = ((gp - gm) / (2.0 * h)).transpose();
  }
  return out;
}

}  // namespace

MetricSpec MetricSpec::euclidean(int n) {
  if (n < 1) throw InvalidInputError("dimension must be positive");
  MetricSpec m;
  m.dimension = n;
  m.kind = MetricKind::euclidean;
  return m;
}

MetricSpec MetricSpec::riemannian(Mat g0) {
  if (g0.rows() != g0.cols() || g0.rows() < 1) throw InvalidInputError("g0 must be square");
  if (!g0.isApprox(g0.transpose(), 1e-12)) throw InvalidInputError("g0 must be symmetric");
  if (g0.llt().info() != Eigen::Success)
    throw MetricDegenerateError("g0 is not positive definite");
  MetricSpec m;
  m.dimension = static_cast<int>(g0.rows());
  m.kind = MetricKind::riemannian;
  m.g_const = std::move(g0);
  return m;
}

MetricSpec MetricSpec::riemannian(int n, std::function<Mat(const Vec&)> g) {
  MetricSpec m;
  m.dimension = n;
  m.kind = MetricKind::riemannian;
  m.g_fn = std::move(g);
  return m;
}

MetricSpec MetricSpec::riemannian_conformal(int n, ConformalFactor factor) {
  MetricSpec m;
  m.dimension = n;
  m.kind = MetricKind::riemannian;
  m.conformal = std::move(factor);
  return m;
}

MetricSpec MetricSpec::round_sphere_patch(int n, double radius) {
  if (radius <= 0.0) throw InvalidInputError("radius must be positive");
  const double r2 = radius * radius;
  ConformalFactor f;
  f.phi = [r2](const Vec& q) { return std::log(2.0 * r2) - std::log(r2 + q.squaredNorm()); };
  f.grad = [r2](const Vec& q) { return Vec(-2.0 / (r2 + q.squaredNorm()) * q); };
  f.hess = [r2](const Vec& q) {
    const double d = r2 + q.squaredNorm();
    Mat h = (4.0 / (d * d)) * (q * q.transpose());
    h -= (2.0 / d) * Mat::Identity(q.size(), q.size());
    return h;
  };
  return riemannian_conformal(n, std::move(f));
}

MetricSpec MetricSpec::randers(Vec beta) {
  MetricSpec m;
  m.dimension = static_cast<int>(beta.size());
  m.kind = MetricKind::randers;
  m.declared_reversible = false;
  m.beta_const = std::move(beta);
  if (!(m.beta_const.norm() < 1.0))
    throw MetricDegenerateError("Randers one-form must have norm < 1");
  return m;
}

MetricSpec MetricSpec::randers(Mat base, Vec beta) {
  MetricSpec m = riemannian(std::move(base));
  m.kind = MetricKind::randers;
  m.declared_reversible = false;
  m.base_g = std::move(m.g_const);
  m.g_const = Mat();
  m.beta_const = std::move(beta);
  check_randers_positive(m, Vec::Zero(m.dimension));
  return m;
}

MetricSpec MetricSpec::randers(int n, std::function<Vec(const Vec&)> beta) {
  MetricSpec m;
  m.dimension = n;
  m.kind = MetricKind::randers;
  m.declared_reversible = false;
  m.beta_fn = std::move(beta);
  return m;
}

MetricSpec MetricSpec::pnorm_metric(int n, double exponent) {
  if (!(exponent > 2.0)) throw InvalidInputError("p-norm exponent must be > 2");
  MetricSpec m;
  m.dimension = n;
  m.kind = MetricKind::pnorm;
  m.p = exponent;
  return m;
}

MetricSpec MetricSpec::analytic(int n, std::function<double(const Vec&, const Vec&)> G,
                                AnalyticJets jets, bool reversible) {
  MetricSpec m;
  m.dimension = n;
  m.kind = MetricKind::analytic;
  m.declared_reversible = reversible;
  m.G_fn = std::move(G);
  m.jets = std::move(jets);
  return m;
}

double eval_F(const MetricSpec& metric, const Vec& q, const Vec& v) {
  check_finite(q, v);
  switch (metric.kind) {
    case MetricKind::euclidean:
      return v.norm();
    case MetricKind::riemannian: {
      const Mat g = riemannian_matrix(metric, q);
      return std::sqrt(v.dot(g * v));
    }
    case MetricKind::randers: {
      check_randers_positive(metric, q);
      const Mat a = base_matrix(metric);
      return std::sqrt(v.dot(a * v)) + beta_at(metric, q).dot(v);
    }
    case MetricKind::pnorm: {
      double s = 0.0;
      for (int i = 0; i < v.size(); ++i) s += std::pow(std::abs(v[i]), metric.p);
      return std::pow(s, 1.0 / metric.p);
    }
    case MetricKind::analytic:
      return std::sqrt(metric.G_fn(q, v));
  }
  throw InvalidInputError("unknown metric kind");
}

double eval_G(const MetricSpec& metric, const Vec& q, const Vec& v) {
  if (metric.kind == MetricKind::analytic) {
    check_finite(q, v);
    return metric.G_fn(q, v);
  }
  const double f = eval_F(metric, q, v);
  return f * f;
}

FirstOrderJet metric_grad(const MetricSpec& metric, const Vec& q, const Vec& v) {
  check_finite(q, v);
  check_nonzero(v);
  const int n = metric.dimension;
  FirstOrderJet out;
  switch (metric.kind) {
    case MetricKind::euclidean:
      out.G = v.squaredNorm();
      out.dqG = Vec::Zero(n);
      out.dvG = 2.0 * v;
      return out;
    case MetricKind::riemannian: {
      const Mat g = riemannian_matrix(metric, q);
      out.G = v.dot(g * v);
      out.dvG = 2.0 * (g * v);
      if (metric.conformal)
        out.dqG = 2.0 * out.G * metric.conformal->grad(q);
      else if (metric.g_fn)
        out.dqG = fd_dqG(metric, q, v);
      else
        out.dqG = Vec::Zero(n);
      return out;
    }
    case MetricKind::randers: {
      check_randers_positive(metric, q);
      const Mat a = base_matrix(metric);
      const Vec av = a * v;
      const double A = std::sqrt(v.dot(av));
      const Vec b = beta_at(metric, q);
      const double F = A + b.dot(v);
      out.G = F * F;
      out.dvG = 2.0 * F * (av / A + b);
      out.dqG = metric.beta_fn ? fd_dqG(metric, q, v) : Vec(Vec::Zero(n));
      return out;
    }
    case MetricKind::pnorm: {
      check_pnorm_smooth(metric, v);
      const double p = metric.p;
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += std::pow(std::abs(v[i]), p);
      out.G = std::pow(s, 2.0 / p);
      out.dqG = Vec::Zero(n);
      out.dvG.resize(n);
      const double c = 2.0 * std::pow(s, 2.0 / p - 1.0);
      for (int i = 0; i < n; ++i)
        out.dvG[i] = c * std::pow(std::abs(v[i]), p - 1.0) * (v[i] > 0 ? 1.0 : -1.0);
      return out;
    }
    case MetricKind::analytic:
      out.G = metric.G_fn(q, v);
      out.dqG = metric.jets.dqG ? metric.jets.dqG(q, v) : fd_dqG(metric, q, v);
      out.dvG = metric.jets.dvG ? metric.jets.dvG(q, v) : fd_dvG(metric, q, v);
      return out;
  }
  throw InvalidInputError("unknown metric kind");
}

MetricJet metric_jet(const MetricSpec& metric, const Vec& q, const Vec& v) {
  check_finite(q, v);
  check_nonzero(v);
  const int n = metric.dimension;
  const FirstOrderJet first = metric_grad(metric, q, v);
  MetricJet jet;
  jet.G = first.G;
  jet.dqG = first.dqG;
  jet.dvG = first.dvG;

  switch (metric.kind) {
    case MetricKind::euclidean:
      jet.dvvG = 2.0 * Mat::Identity(n, n);
      jet.dqvG = Mat::Zero(n, n);
      jet.dqqG = Mat::Zero(n, n);
      break;
    case MetricKind::riemannian: {
      const Mat g = riemannian_matrix(metric, q);
      jet.dvvG = 2.0 * g;
      if (metric.conformal) {
        jet.dqvG = 2.0 * metric.conformal->grad(q) * jet.dvG.transpose();
        const Vec dphi = metric.conformal->grad(q);
        jet.dqqG = jet.G * (4.0 * dphi * dphi.transpose() + 2.0 * metric.conformal->hess(q));
      } else if (metric.g_fn) {
        jet.dqvG = fd_dqvG(metric, q, v, [&](const Vec& qq) {
          return Vec(2.0 * (metric.g_fn(qq) * v));
        });
        jet.dqqG = fd_dqqG(metric, q, v);
      } else {
        jet.dqvG = Mat::Zero(n, n);
        jet.dqqG = Mat::Zero(n, n);
      }
      break;
    }
    case MetricKind::randers: {
      const Mat a = base_matrix(metric);
      const Vec av = a * v;
      const double A = std::sqrt(v.dot(av));
      const Vec b = beta_at(metric, q);
      const double F = A + b.dot(v);
      const Vec u = av / A + b;  // dvF
      const Mat dvvF = a / A - (av * av.transpose()) / (A * A * A);
      jet.dvvG = 2.0 * (u * u.transpose() + F * dvvF);
      if (metric.beta_fn) {
        jet.dqvG = fd_dqvG(metric, q, v, [&](const Vec& qq) {
          const Vec bq = metric.beta_fn(qq);
          const double Fq = A + bq.dot(v);
          return Vec(2.0 * Fq * (av / A + bq));
        });
        jet.dqqG = fd_dqqG(metric, q, v);
      } else {
        jet.dqvG = Mat::Zero(n, n);
        jet.dqqG = Mat::Zero(n, n);
      }
      break;
    }
    case MetricKind::pnorm: {
      const double p = metric.p;
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += std::pow(std::abs(v[i]), p);
      Vec w(n);  // |v_i|^{p-1} sgn(v_i)
      for (int i = 0; i < n; ++i)
        w[i] = std::pow(std::abs(v[i]), p - 1.0) * (v[i] > 0 ? 1.0 : -1.0);
      jet.dvvG = 2.0 * (2.0 - p) * std::pow(s, 2.0 / p - 2.0) * (w * w.transpose());
      const double c = 2.0 * (p - 1.0) * std::pow(s, 2.0 / p - 1.0);
      for (int i = 0; i < n; ++i) jet.dvvG(i, i) += c * std::pow(std::abs(v[i]), p - 2.0);
      jet.dqvG = Mat::Zero(n, n);
      jet.dqqG = Mat::Zero(n, n);
      break;
    }
    case MetricKind::analytic:
      jet.dvvG = metric.jets.dvvG ? metric.jets.dvvG(q, v) : fd_dvvG(metric, q, v);
      jet.dqvG = metric.jets.dqvG
                     ? metric.jets.dqvG(q, v)
                     : fd_dqvG(metric, q, v,
                               [&](const Vec& qq) { return fd_dvG(metric, qq, v); });
      jet.dqqG = metric.jets.dqqG ? metric.jets.dqqG(q, v) : fd_dqqG(metric, q, v);
      break;
  }

  Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (jet.dvvG + jet.dvvG.transpose()));
  if (eig.eigenvalues().minCoeff() <= 0.0)
    throw MetricDegenerateError("dvvG is not positive definite");
  return jet;
}

Mat fundamental_tensor(const MetricSpec& metric, const Vec& q, const Vec& v) {
  const MetricJet jet = metric_jet(metric, q, v);
  return 0.5 * jet.dvvG;
}

Vec spray(const MetricSpec& metric, const Vec& q, const Vec& v) {
  const MetricJet jet = metric_jet(metric, q, v);
  const Mat g = 0.5 * jet.dvvG;
  const Vec rhs = jet.dqvG.transpose() * v - jet.dqG;
  Eigen::LDLT<Mat> solver(g);
  if (solver.info() != Eigen::Success)
    throw MetricDegenerateError("fundamental tensor is singular");
  return -0.5 * solver.solve(rhs);
}

std::pair<bool, double> is_reversible(const MetricSpec& metric,
                                      const std::vector<std::pair<Vec, Vec>>& samples,
                                      double tol) {
  if (samples.empty()) throw InvalidInputError("is_reversible needs samples");
  double max_asym = 0.0;
  for (const auto& [q, v] : samples) {
    if (v.norm() == 0.0) throw InvalidInputError("is_reversible sample with v = 0");
    const double fwd = eval_F(metric, q, v);
    const double bwd = eval_F(metric, q, Vec(-v));
    max_asym = std::max(max_asym, std::abs(fwd - bwd) / fwd);
  }
  return {max_asym <= tol, max_asym};
}

BoundsEstimate estimate_bounds(const MetricSpec& metric, const RegionSampler& sampler,
                               int count, Rng& rng) {
  if (count < 1) throw InvalidInputError("estimate_bounds needs count >= 1");
  BoundsEstimate out;
  out.sample_count = count;
  out.ell = 1.0;
  out.alpha = std::numeric_limits<double>::infinity();
  for (int i = 0; i < count; ++i) {
    auto [q, v] = sampler(rng);
    v /= v.norm();
    const double g = eval_G(metric, q, v);
    if (!(g > 0.0) || !std::isfinite(g))
      throw MetricDegenerateError("estimate_bounds hit a degenerate sample");
    out.ell = std::max({out.ell, g, 1.0 / g});
    const MetricJet jet = metric_jet(metric, q, v);
    Eigen::SelfAdjointEigenSolver<Mat> eig(jet.dvvG);
    out.alpha = std::min(out.alpha, eig.eigenvalues().minCoeff());
  }
  return out;
}

}  // namespace ofgc
