#pragma once

#include <functional>
#include <utility>

#include "ofgc/errors.hpp"
#include "ofgc/metric.hpp"
#include "ofgc/types.hpp"

namespace ofgc {

/// Compact domain Omega = {phi < 0} with C^2 boundary {phi = 0}.
/// grad_phi must be nonzero on the band |phi| <= delta0 and the sublevel
/// {phi <= delta0} must fit inside [box_lo, box_hi] (used by samplers).
struct ImplicitDomain {
  int dimension = 0;
  std::function<double(const Vec&)> phi;
  std::function<Vec(const Vec&)> grad_phi;
  std::function<Mat(const Vec&)> hess_phi;
  double delta0 = 0.25;
  Vec box_lo, box_hi;
  // Center from which every boundary point is visible along a ray; empty
  // when no star-shape certificate is available (blocks chord seeding).
  bool star_shaped = false;
  Vec star_center;

  double tol_phi() const { return 1e-10 * (1.0 + delta0); }
};

struct DomainConstants {
  double K0 = 0.0;      // max |grad phi| over the band |phi| <= delta0
  double delta_m = 0.0; // delta0^2 / (2 ell K0^2)
  double ell = 1.0;
};

ImplicitDomain make_ball(int n, double radius, double delta0 = -1.0);
ImplicitDomain make_ellipse(double a, double b, double delta0 = -1.0);

/// Two overlapping disks of the given radius centered at (-sep, 0), (+sep, 0),
/// merged by a quartically smoothed min; blend controls the neck rounding.
/// Non-convex: the boundary is concave along the neck arcs.
ImplicitDomain make_peanut(double sep = 0.7, double radius = 0.8, double blend = 0.39,
                           double delta0 = -1.0);

/// phi(q) = 1/2 q^T A q + b.q + c with user-provided box and delta0.
ImplicitDomain make_quadratic(Mat A, Vec b, double c, double delta0, Vec box_lo, Vec box_hi);

/// Newton flow of q along grad phi until |phi| <= tol_phi.
Vec boundary_project(const ImplicitDomain& domain, const Vec& q);

/// Remove the normal component of w at a boundary point q.
Vec tangent_project(const ImplicitDomain& domain, const Vec& q, const Vec& w);

/// Second derivative of phi along the Finsler geodesic through (q, v):
/// v . Hess(phi) v + grad(phi) . spray(q, v).
double finsler_hessian(const MetricSpec& metric, const ImplicitDomain& domain, const Vec& q,
                       const Vec& v);

DomainConstants domain_constants(const MetricSpec& metric, const ImplicitDomain& domain,
                                 const BoundsEstimate& bounds, int sample_count = 10000,
                                 std::uint64_t seed = 42);

struct ConvexityScan {
  double min_H = 0.0;
  Vec location;
  Vec direction;
};

/// Minimum of finsler_hessian over sampled boundary points and unit tangent
/// directions; a positive minimum certifies sampled strict convexity.
ConvexityScan convexity_scan(const MetricSpec& metric, const ImplicitDomain& domain,
                             int samples, std::uint64_t seed = 42);

/// Rejection sample a point with phi(q) <= delta0.
Vec sample_sublevel(const ImplicitDomain& domain, Rng& rng);

/// Rejection sample a point in the band |phi(q)| <= delta0.
Vec sample_band(const ImplicitDomain& domain, Rng& rng);

/// (q, v) sampler over the sublevel set with unit-sphere directions, for
/// estimate_bounds.
RegionSampler make_strip_sampler(const ImplicitDomain& domain);

/// Distance along the ray from star_center in direction u (unit) to the
/// boundary. Requires a star-shape certificate.
double ray_to_boundary(const ImplicitDomain& domain, const Vec& u);

/// Boundary point at polar angle theta of a 2-D star-shaped domain.
Vec boundary_point_2d(const ImplicitDomain& domain, double theta);

}  // namespace ofgc
