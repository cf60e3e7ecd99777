#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ofgc/domain.hpp"
#include "ofgc/metric.hpp"
#include "ofgc/types.hpp"

namespace ofgc {

/// Uniformly sampled curve q_0, ..., q_n on [0, 1], stored as the
/// dimension x (n + 1) matrix of node columns. Value type: copies are cheap
/// enough at desk scale and every operation below is pure.
struct DiscreteCurve {
  Mat nodes;

  DiscreteCurve() = default;
  explicit DiscreteCurve(Mat node_columns);

  int dim() const { return static_cast<int>(nodes.rows()); }
  int segments() const { return static_cast<int>(nodes.cols()) - 1; }
  Vec node(int k) const { return nodes.col(k); }
  Vec midpoint(int k) const { return 0.5 * (nodes.col(k) + nodes.col(k + 1)); }
  /// Forward-difference velocity n * (q_{k+1} - q_k) of segment k.
  Vec velocity(int k) const { return static_cast<double>(segments()) * (nodes.col(k + 1) - nodes.col(k)); }

  bool is_constant(double tol = 0.0) const;
};

inline constexpr int kMinSegments = 8;

/// Straight-line curve between two points.
DiscreteCurve line_curve(const Vec& a, const Vec& b, int n);

/// J = 1/2 sum (1/n) G(midpoint_k, velocity_k); 0 for constant curves.
double energy(const MetricSpec& metric, const DiscreteCurve& curve);

/// Exact node-wise gradient of the discrete energy, endpoints included.
/// Returned as a matrix shaped like curve.nodes.
Mat energy_gradient(const MetricSpec& metric, const DiscreteCurve& curve);

/// max(|xi_0|, |xi_n|) + sqrt(sum (1/n) |n (xi_{k+1} - xi_k)|^2)
double star_norm(const Mat& variation);

double star_dist(const DiscreteCurve& c1, const DiscreteCurve& c2);

DiscreteCurve reverse(const DiscreteCurve& curve);

/// Boundary-pair seed through the radial homeomorphism onto the unit ball:
/// nodes at Psi^{-1}((1 - s) Psi(A) + s Psi(B)). Requires a star-shape
/// certificate on the domain; seed(B, A) is exactly reverse(seed(A, B)).
DiscreteCurve chord_seed(const ImplicitDomain& domain, const Vec& A, const Vec& B, int n);

/// Max seed energy over a uniform grid of boundary pairs (an empirical upper
/// bound for the seeded family).
double family_max_energy(const MetricSpec& metric, const ImplicitDomain& domain,
                         int boundary_grid, int n);

/// Resample so F(gamma, gamma') is constant across segments. Lowers energy.
DiscreteCurve reparametrize_const_speed(const MetricSpec& metric, const DiscreteCurve& curve);

void write_curve_csv(std::ostream& os, const DiscreteCurve& curve);
void write_curve_csv_file(const std::string& path, const DiscreteCurve& curve);
DiscreteCurve read_curve_csv(std::istream& is);
DiscreteCurve read_curve_csv_file(const std::string& path);

}  // namespace ofgc
