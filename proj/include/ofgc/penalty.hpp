#pragma once

#include <optional>
#include <vector>

#include "ofgc/curve.hpp"
#include "ofgc/domain.hpp"
#include "ofgc/metric.hpp"

namespace ofgc {

enum class DescentMethod { gradient, conjugate_gradient };

struct PenaltyParams {
  std::vector<double> delta_schedule;  // strictly decreasing, inside (0, delta0)
  double grad_tol = 0.0;               // 0 => 1e-6 * n at solve time
  int max_iters = 20000;
  double shrink = 0.5;
  double sufficient_decrease = 1e-4;
  DescentMethod method = DescentMethod::conjugate_gradient;
};

std::vector<double> default_schedule(double delta0);

struct StageInfo {
  double delta = 0.0;
  int iterations = 0;
  double grad_norm = 0.0;
  double penalty_integral = 0.0;
  double excursion = 0.0;  // max over nodes of max(0, phi)
  bool converged = false;
};

struct SolverReport {
  DiscreteCurve final_curve;
  double delta_used = 0.0;
  int iterations = 0;
  double final_grad_norm = 0.0;
  double penalty_integral = 0.0;
  double energy_constant_residual = 0.0;
  Vec lambda_profile;
  bool converged = false;
  std::vector<StageInfo> stages;
};

/// Barrier-style penalty: 0 for t <= 0, t^2 / (delta - t)^2 on [0, delta).
/// Throws PenaltyBlowupError at t >= delta.
double chi(double delta, double t);

/// 2 t delta / (delta - t)^3 on (0, delta), 0 for t <= 0.
double chi_prime(double delta, double t);

/// energy + trapezoid quadrature of chi(phi) over the nodes.
double penalized_energy(const MetricSpec& metric, const ImplicitDomain& domain, double delta,
                        const DiscreteCurve& curve);

/// Exact gradient of penalized_energy, all nodes.
Mat penalized_gradient(const MetricSpec& metric, const ImplicitDomain& domain, double delta,
                       const DiscreteCurve& curve);

/// Line-searched descent on the interior nodes, endpoints held fixed.
SolverReport minimize_fixed_endpoints(const MetricSpec& metric, const ImplicitDomain& domain,
                                      double delta, const DiscreteCurve& seed,
                                      const PenaltyParams& params);

/// minimize_fixed_endpoints along the schedule, warm-starting each stage.
SolverReport continuation(const MetricSpec& metric, const ImplicitDomain& domain,
                          const PenaltyParams& params, const DiscreteCurve& seed);

/// Node-wise multiplier -chi'(delta, phi(q_k)); nonpositive, zero inside.
Vec lambda_recover(const ImplicitDomain& domain, double delta, const DiscreteCurve& curve);

/// Spread of e_k = G(m_k, v_k)/2 - chi(phi(m_k)) across segments, relative:
/// (max - min) / (1 + mean |e|). Small on converged critical curves.
double energy_constant_residual(const MetricSpec& metric, const ImplicitDomain& domain,
                                double delta, const DiscreteCurve& curve);

enum class EventKind { boundary_crossing, tangency };

struct TrajectoryEvent {
  double time = 0.0;
  EventKind kind = EventKind::boundary_crossing;
  Vec q, v;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> positions;
  std::vector<Vec> velocities;
  std::vector<TrajectoryEvent> events;
};

/// RK4 integration of q'' = spray(q, q') [+ chi'(phi) g^{-1} grad phi when
/// delta is set]. Conserves G along free geodesics to O(step^4).
Trajectory shoot_geodesic(const MetricSpec& metric, const ImplicitDomain& domain,
                          std::optional<double> delta, const Vec& q0, const Vec& v0,
                          double t_max, double step = 1e-3);

}  // namespace ofgc
