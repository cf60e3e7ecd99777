#include "ofgc/penalty.hpp"

#include <cmath>
#include <limits>

namespace ofgc {

namespace {

constexpr double kMinLineSearchStep = 1e-18;

double trapezoid_weight(int k, int n) { return (k == 0 || k == n) ? 0.5 / n : 1.0 / n; }

double penalty_integral_of(const ImplicitDomain& domain, double delta,
                           const DiscreteCurve& curve) {
  const int n = curve.segments();
  double p = 0.0;
  for (int k = 0; k <= n; ++k)
    p += trapezoid_weight(k, n) * chi(delta, domain.phi(curve.node(k)));
  return p;
}

double excursion_of(const ImplicitDomain& domain, const DiscreteCurve& curve) {
  double e = 0.0;
  for (int k = 0; k <= curve.segments(); ++k)
    e = std::max(e, domain.phi(curve.node(k)));
  return std::max(e, 0.0);
}

// Pull any node with phi >= 0.9 * delta back to phi <= 0.5 * delta so a
// warm start stays feasible for the next, smaller delta.
void restore_feasibility(const ImplicitDomain& domain, double delta, DiscreteCurve& curve) {
  const int n = curve.segments();
  for (int k = 1; k < n; ++k) {
    Vec q = curve.node(k);
    double f = domain.phi(q);
    for (int it = 0; it < 30 && f > 0.5 * delta; ++it) {
      const Vec g = domain.grad_phi(q);
      const double g2 = g.squaredNorm();
      if (g2 == 0.0) break;
      q -= ((f - 0.25 * delta) / g2) * g;
      f = domain.phi(q);
    }
    curve.nodes.col(k) = q;
  }
}

}  // namespace

std::vector<double> default_schedule(double delta0) {
  return {delta0 / 4.0, delta0 / 8.0, delta0 / 16.0, delta0 / 32.0, delta0 / 64.0};
}

double chi(double delta, double t) {
  if (!(delta > 0.0)) throw InvalidInputError("chi needs delta > 0");
  if (t <= 0.0) return 0.0;
  if (t >= delta) throw PenaltyBlowupError("chi evaluated at t >= delta");
  const double r = t / (delta - t);
  return r * r;
}

double chi_prime(double delta, double t) {
  if (!(delta > 0.0)) throw InvalidInputError("chi_prime needs delta > 0");
  if (t <= 0.0) return 0.0;
  if (t >= delta) throw PenaltyBlowupError("chi_prime evaluated at t >= delta");
  const double d = delta - t;
  return 2.0 * t * delta / (d * d * d);
}

double penalized_energy(const MetricSpec& metric, const ImplicitDomain& domain, double delta,
                        const DiscreteCurve& curve) {
  return energy(metric, curve) + penalty_integral_of(domain, delta, curve);
}

Mat penalized_gradient(const MetricSpec& metric, const ImplicitDomain& domain, double delta,
                       const DiscreteCurve& curve) {
  Mat grad = energy_gradient(metric, curve);
  const int n = curve.segments();
  for (int k = 0; k <= n; ++k) {
    const Vec q = curve.node(k);
    const double cp = chi_prime(delta, domain.phi(q));
    if (cp != 0.0) grad.col(k) += trapezoid_weight(k, n) * cp * domain.grad_phi(q);
  }
  return grad;
}

SolverReport minimize_fixed_endpoints(const MetricSpec& metric, const ImplicitDomain& domain,
                                      double delta, const DiscreteCurve& seed,
                                      const PenaltyParams& params) {
  const int n = seed.segments();
  for (int k = 0; k <= n; ++k)
    if (domain.phi(seed.node(k)) >= delta)
      throw PenaltyBlowupError("seed node violates phi < delta");

  const double grad_tol = params.grad_tol > 0.0 ? params.grad_tol : 1e-6 * n;
  const double scale = 1.0 / n;  // diagonal preconditioner
  DiscreteCurve x = seed;
  double fx = penalized_energy(metric, domain, delta, x);

  auto interior = [n](const Mat& m) { return m.middleCols(1, n - 1); };

  Mat grad = penalized_gradient(metric, domain, delta, x);
  Mat g = interior(grad);
  Mat dir = -scale * g;
  Mat g_prev;

  SolverReport report;
  int it = 0;
  bool converged = false;
  for (; it < params.max_iters; ++it) {
    const double gnorm = g.norm();
    if (gnorm <= grad_tol) {
      converged = true;
      break;
    }

    double slope = (g.array() * dir.array()).sum();
    if (slope >= 0.0) {  // restart on a non-descent direction
      dir = -scale * g;
      slope = (g.array() * dir.array()).sum();
    }

    double alpha = 1.0;
    double ft = fx;
    bool accepted = false;
    bool all_blowup = true;
    DiscreteCurve trial = x;
    while (alpha >= kMinLineSearchStep) {
      trial.nodes.middleCols(1, n - 1) = x.nodes.middleCols(1, n - 1) + alpha * dir;
      try {
        ft = penalized_energy(metric, domain, delta, trial);
        all_blowup = false;
      } catch (const PenaltyBlowupError&) {
        alpha *= params.shrink;
        continue;
      } catch (const DegenerateCurveError&) {
        all_blowup = false;
        alpha *= params.shrink;
        continue;
      }
      if (ft < fx + params.sufficient_decrease * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= params.shrink;
    }
    if (!accepted) {
      if (all_blowup)
        throw StuckAtBarrierError("every trial step hit the penalty barrier");
      break;  // line-search floor: report with current gradient norm
    }

    x.nodes = trial.nodes;
    fx = ft;
    g_prev = g;
    grad = penalized_gradient(metric, domain, delta, x);
    g = interior(grad);

    if (params.method == DescentMethod::conjugate_gradient) {
      // Polak-Ribiere+ with the diagonal metric as preconditioner.
      const double denom = (g_prev.array() * g_prev.array()).sum() * scale;
      double beta = 0.0;
      if (denom > 0.0)
        beta = std::max(0.0, scale * (g.array() * (g - g_prev).array()).sum() / denom);
      dir = -scale * g + beta * dir;
    } else {
      dir = -scale * g;
    }
  }

  report.final_curve = x;
  report.delta_used = delta;
  report.iterations = it;
  report.final_grad_norm = g.norm();
  report.converged = converged || report.final_grad_norm <= grad_tol;
  report.penalty_integral = penalty_integral_of(domain, delta, x);
  report.lambda_profile = lambda_recover(domain, delta, x);
  report.energy_constant_residual =
      x.is_constant() ? 0.0 : energy_constant_residual(metric, domain, delta, x);
  return report;
}

SolverReport continuation(const MetricSpec& metric, const ImplicitDomain& domain,
                          const PenaltyParams& params, const DiscreteCurve& seed) {
  if (params.delta_schedule.empty())
    throw InvalidInputError("continuation needs a nonempty schedule");
  for (size_t i = 0; i < params.delta_schedule.size(); ++i) {
    const double d = params.delta_schedule[i];
    if (!(d > 0.0) || !(d < domain.delta0) ||
        (i > 0 && !(d < params.delta_schedule[i - 1])))
      throw InvalidInputError("schedule must be strictly decreasing inside (0, delta0)");
  }

  SolverReport report;
  DiscreteCurve x = seed;
  int total_iters = 0;
  for (size_t i = 0; i < params.delta_schedule.size(); ++i) {
    const double delta = params.delta_schedule[i];
    if (i > 0) restore_feasibility(domain, delta, x);
    SolverReport stage_report;
    try {
      stage_report = minimize_fixed_endpoints(metric, domain, delta, x, params);
    } catch (const Error& e) {
      throw ContinuationStalledError("continuation stalled at delta = " +
                                     std::to_string(delta) + ": " + e.what());
    }
    x = stage_report.final_curve;
    total_iters += stage_report.iterations;
    StageInfo info;
    info.delta = delta;
    info.iterations = stage_report.iterations;
    info.grad_norm = stage_report.final_grad_norm;
    info.penalty_integral = stage_report.penalty_integral;
    info.excursion = excursion_of(domain, x);
    info.converged = stage_report.converged;
    report.stages.push_back(info);
    if (i + 1 == params.delta_schedule.size()) {
      report.final_curve = x;
      report.delta_used = delta;
      report.final_grad_norm = stage_report.final_grad_norm;
      report.converged = stage_report.converged;
      report.penalty_integral = stage_report.penalty_integral;
      report.lambda_profile = stage_report.lambda_profile;
      report.energy_constant_residual = stage_report.energy_constant_residual;
    }
  }
  report.iterations = total_iters;
  return report;
}

Vec lambda_recover(const ImplicitDomain& domain, double delta, const DiscreteCurve& curve) {
  const int n = curve.segments();
  Vec lambda(n + 1);
  for (int k = 0; k <= n; ++k)
    lambda[k] = -chi_prime(delta, domain.phi(curve.node(k)));
  return lambda;
}

double energy_constant_residual(const MetricSpec& metric, const ImplicitDomain& domain,
                                double delta, const DiscreteCurve& curve) {
  const int n = curve.segments();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double mean_abs = 0.0;
  for (int k = 0; k < n; ++k) {
    const Vec m = curve.midpoint(k);
    const double e = 0.5 * eval_G(metric, m, curve.velocity(k)) - chi(delta, domain.phi(m));
    lo = std::min(lo, e);
    hi = std::max(hi, e);
    mean_abs += std::abs(e);
  }
  mean_abs /= n;
  return (hi - lo) / (1.0 + mean_abs);
}

Trajectory shoot_geodesic(const MetricSpec& metric, const ImplicitDomain& domain,
                          std::optional<double> delta, const Vec& q0, const Vec& v0,
                          double t_max, double step) {
  if (v0.norm() == 0.0) throw ZeroSectionError("shoot_geodesic needs v0 != 0");
  if (!(t_max > 0.0) || !(step > 0.0)) throw InvalidInputError("t_max, step must be > 0");

  auto accel = [&](const Vec& q, const Vec& v) -> Vec {
    Vec a = spray(metric, q, v);
    if (delta) {
      const double cp = chi_prime(*delta, domain.phi(q));
      if (cp != 0.0) {
        const Mat g = fundamental_tensor(metric, q, v);
        a += cp * g.ldlt().solve(domain.grad_phi(q));
      }
    }
    return a;
  };
  auto invariant = [&](const Vec& q, const Vec& v) {
    const double g = eval_G(metric, q, v);
    return delta ? 0.5 * g - chi(*delta, domain.phi(q)) : g;
  };

  Trajectory traj;
  Vec q = q0, v = v0;
  double t = 0.0;
  traj.times.push_back(t);
  traj.positions.push_back(q);
  traj.velocities.push_back(v);
  const double e0 = invariant(q, v);
  const double v0n = v0.norm();

  double phi_prev = domain.phi(q);
  double tang_prev = domain.grad_phi(q).dot(v);
  const double tangency_band = 1e-6 + 1e-3 * domain.delta0;

  const int steps = static_cast<int>(std::ceil(t_max / step));
  for (int i = 0; i < steps; ++i) {
    const double h = std::min(step, t_max - t);
    const Vec k1q = v, k1v = accel(q, v);
    const Vec k2q = v + 0.5 * h * k1v, k2v = accel(q + 0.5 * h * k1q, v + 0.5 * h * k1v);
    const Vec k3q = v + 0.5 * h * k2v, k3v = accel(q + 0.5 * h * k2q, v + 0.5 * h * k2v);
    const Vec k4q = v + h * k3v, k4v = accel(q + h * k3q, v + h * k3v);
    q += (h / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
    v += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    t += h;

    if (v.norm() < 1e-10 * v0n)
      throw ZeroSectionError("velocity collapsed during integration");
    const double e = invariant(q, v);
    if (std::abs(e - e0) > 0.1 * (1.0 + std::abs(e0)))
      throw IntegratorFailureError("energy drift exceeded 10%");

    traj.times.push_back(t);
    traj.positions.push_back(q);
    traj.velocities.push_back(v);

    const double phi_cur = domain.phi(q);
    if ((phi_prev < 0.0) != (phi_cur < 0.0) || (phi_prev != 0.0 && phi_cur == 0.0)) {
      TrajectoryEvent ev;
      ev.kind = EventKind::boundary_crossing;
      const double w = phi_prev / (phi_prev - phi_cur);
      ev.time = t - h + w * h;
      ev.q = traj.positions[traj.positions.size() - 2] +
             w * (q - traj.positions[traj.positions.size() - 2]);
      ev.v = traj.velocities[traj.velocities.size() - 2] +
             w * (v - traj.velocities[traj.velocities.size() - 2]);
      traj.events.push_back(ev);
    }
    const double tang_cur = domain.grad_phi(q).dot(v);
    if (std::abs(phi_cur) <= tangency_band && tang_prev * tang_cur < 0.0) {
      TrajectoryEvent ev;
      ev.kind = EventKind::tangency;
      const double w = tang_prev / (tang_prev - tang_cur);
      ev.time = t - h + w * h;
      ev.q = q;
      ev.v = v;
      traj.events.push_back(ev);
    }
    phi_prev = phi_cur;
    tang_prev = tang_cur;
  }
  return traj;
}

}  // namespace ofgc
