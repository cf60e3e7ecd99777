#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "ofgc/errors.hpp"
#include "ofgc/types.hpp"

namespace ofgc {

enum class MetricKind { euclidean, riemannian, randers, pnorm, analytic };

/// All derivatives of the energy function G = F^2 at one (q, v).
/// Index convention: dqvG(i, j) = d^2 G / dq_i dv_j.
struct MetricJet {
  double G = 0.0;
  Vec dqG;
  Vec dvG;
  Mat dvvG;  // symmetric, positive definite off the zero section
  Mat dqvG;
  Mat dqqG;  // symmetric
};

/// First-order data only (G, dqG, dvG): the pieces the energy gradient needs.
struct FirstOrderJet {
  double G = 0.0;
  Vec dqG;
  Vec dvG;
};

/// Two-sided comparison constants against the Euclidean norm on a region:
///   |v|^2 / ell <= G(q, v) <= ell |v|^2,  eigmin(dvvG) >= alpha.
struct BoundsEstimate {
  double ell = 1.0;
  double alpha = 0.0;
  int sample_count = 0;
};

/// Closed-form conformal coefficient e^{2 phi(q)} for Riemannian metrics
/// g(q) = e^{2 phi(q)} I, with analytic derivatives of phi.
struct ConformalFactor {
  std::function<double(const Vec&)> phi;
  std::function<Vec(const Vec&)> grad;
  std::function<Mat(const Vec&)> hess;
};

/// Optional analytic derivative callbacks for MetricKind::analytic.
struct AnalyticJets {
  std::function<Vec(const Vec&, const Vec&)> dqG;
  std::function<Vec(const Vec&, const Vec&)> dvG;
  std::function<Mat(const Vec&, const Vec&)> dvvG;
  std::function<Mat(const Vec&, const Vec&)> dqvG;
  std::function<Mat(const Vec&, const Vec&)> dqqG;
};

/// A Finsler metric definition. Immutable after construction; evaluation is
/// pure, so instances are safe to share across threads.
struct MetricSpec {
  int dimension = 0;
  MetricKind kind = MetricKind::euclidean;
  bool declared_reversible = true;

  // Riemannian payload: exactly one of g_const / conformal / g_fn is active.
  Mat g_const;
  std::optional<ConformalFactor> conformal;
  std::function<Mat(const Vec&)> g_fn;

  // Randers payload: Riemannian base (identity unless base_g set) plus a
  // one-form with base norm < 1 everywhere.
  Mat base_g;  // empty => identity
  Vec beta_const;
  std::function<Vec(const Vec&)> beta_fn;

  // p-norm payload.
  double p = 0.0;

  // Analytic payload.
  std::function<double(const Vec&, const Vec&)> G_fn;
  AnalyticJets jets;

  static MetricSpec euclidean(int n);
  static MetricSpec riemannian(Mat g0);
  static MetricSpec riemannian(int n, std::function<Mat(const Vec&)> g);
  static MetricSpec riemannian_conformal(int n, ConformalFactor factor);
  /// Stereographic patch of the round sphere of the given radius,
  /// g(q) = 4 r^4 / (r^2 + |q|^2)^2 I.
  static MetricSpec round_sphere_patch(int n, double radius);
  static MetricSpec randers(Vec beta);
  static MetricSpec randers(Mat base, Vec beta);
  static MetricSpec randers(int n, std::function<Vec(const Vec&)> beta);
  static MetricSpec pnorm_metric(int n, double exponent);
  static MetricSpec analytic(int n, std::function<double(const Vec&, const Vec&)> G,
                             AnalyticJets jets = {}, bool reversible = true);
};

// Finite-difference step for jets without closed forms.
inline double jet_step(const Vec& v) { return 1e-5 * (1.0 + v.norm()); }

// Relative Euler-identity tolerances.
inline constexpr double kEulerTolAnalytic = 1e-8;
inline constexpr double kEulerTolFiniteDiff = 1e-4;

// Components within 1e-8 * |v| of a coordinate hyperplane make p-norm jets
// ill-conditioned and are refused.
inline constexpr double kPnormHyperplaneTol = 1e-8;

inline constexpr double kReversibilityTol = 1e-8;

double eval_F(const MetricSpec& metric, const Vec& q, const Vec& v);
double eval_G(const MetricSpec& metric, const Vec& q, const Vec& v);

FirstOrderJet metric_grad(const MetricSpec& metric, const Vec& q, const Vec& v);
MetricJet metric_jet(const MetricSpec& metric, const Vec& q, const Vec& v);

/// g(q, v) = 1/2 dvvG; symmetric positive definite for v != 0.
Mat fundamental_tensor(const MetricSpec& metric, const Vec& q, const Vec& v);

/// Geodesic acceleration: integral curves of (q, v) -> (v, spray(q, v)) are
/// the metric's geodesics. Positively homogeneous of degree 2 in v.
Vec spray(const MetricSpec& metric, const Vec& q, const Vec& v);

/// Max sampled relative asymmetry |F(q,v) - F(q,-v)| / F(q,v) and whether it
/// stays below tol.
std::pair<bool, double> is_reversible(const MetricSpec& metric,
                                      const std::vector<std::pair<Vec, Vec>>& samples,
                                      double tol = kReversibilityTol);

using RegionSampler = std::function<std::pair<Vec, Vec>(Rng&)>;

BoundsEstimate estimate_bounds(const MetricSpec& metric, const RegionSampler& sampler,
                               int count, Rng& rng);

}  // namespace ofgc
