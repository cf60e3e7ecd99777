#include "ofgc/domain.hpp"

#include <cmath>
#include <limits>

namespace ofgc {

namespace {

constexpr int kMaxProjectionIters = 50;
constexpr int kMaxRejectionTries = 200000;

Vec vec2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

}  // namespace

ImplicitDomain make_ball(int n, double radius, double delta0) {
  if (n < 1 || radius <= 0.0) throw InvalidInputError("ball needs n >= 1, radius > 0");
  ImplicitDomain d;
  d.dimension = n;
  const double r2 = radius * radius;
  d.phi = [r2](const Vec& q) { return 0.5 * (q.squaredNorm() - r2); };
  d.grad_phi = [](const Vec& q) { return q; };
  d.hess_phi = [n](const Vec&) { return Mat::Identity(n, n); };
  d.delta0 = delta0 > 0.0 ? delta0 : 0.25 * r2;
  if (!(d.delta0 < 0.5 * r2))
    throw InvalidInputError("ball delta0 too large: grad phi vanishes in the band");
  const double reach = std::sqrt(r2 + 2.0 * d.delta0) * 1.05;
  d.box_lo = Vec::Constant(n, -reach);
  d.box_hi = Vec::Constant(n, reach);
  d.star_shaped = true;
  d.star_center = Vec::Zero(n);
  return d;
}

ImplicitDomain make_ellipse(double a, double b, double delta0) {
  if (a <= 0.0 || b <= 0.0) throw InvalidInputError("ellipse needs a, b > 0");
  ImplicitDomain d;
  d.dimension = 2;
  const double ia = 1.0 / (a * a), ib = 1.0 / (b * b);
  d.phi = [ia, ib](const Vec& q) { return 0.5 * (q[0] * q[0] * ia + q[1] * q[1] * ib - 1.0); };
  d.grad_phi = [ia, ib](const Vec& q) { return vec2(q[0] * ia, q[1] * ib); };
  d.hess_phi = [ia, ib](const Vec&) {
    Mat h(2, 2);
    h << ia, 0.0, 0.0, ib;
    return h;
  };
  d.delta0 = delta0 > 0.0 ? delta0 : 0.25;
  if (!(d.delta0 < 0.5))
    throw InvalidInputError("ellipse delta0 too large: grad phi vanishes in the band");
  const double grow = std::sqrt(1.0 + 2.0 * d.delta0) * 1.05;
  d.box_lo = vec2(-a * grow, -b * grow);
  d.box_hi = vec2(a * grow, b * grow);
  d.star_shaped = true;
  d.star_center = Vec::Zero(2);
  return d;
}

ImplicitDomain make_peanut(double sep, double radius, double blend, double delta0) {
  if (sep <= 0.0 || radius <= sep || blend <= 0.0)
    throw InvalidInputError("peanut needs 0 < sep < radius and blend > 0");
  ImplicitDomain d;
  d.dimension = 2;
  const double r2 = radius * radius;
  const double s4 = blend * blend * blend * blend;
  // phi_i = (|q - p_i|^2 - r^2) / 2 for centers p_{1,2} = (-+sep, 0);
  // their difference D = 2 sep x is affine, so the smoothed min
  //   phi = (phi_1 + phi_2)/2 - sqrt(D^2 + blend^4)/2
  // has the closed-form Hessian I - (blend^4 / S^3) w w^T / 2, w = grad D.
  auto parts = [sep, r2](const Vec& q) {
    const double x = q[0], y = q[1];
    const double p1 = 0.5 * ((x + sep) * (x + sep) + y * y - r2);
    const double p2 = 0.5 * ((x - sep) * (x - sep) + y * y - r2);
    return std::pair<double, double>{p1, p2};
  };
  d.phi = [parts, s4](const Vec& q) {
    auto [p1, p2] = parts(q);
    const double D = p1 - p2;
    return 0.5 * (p1 + p2) - 0.5 * std::sqrt(D * D + s4);
  };
  d.grad_phi = [parts, s4, sep](const Vec& q) {
    auto [p1, p2] = parts(q);
    const double D = p1 - p2;
    const double S = std::sqrt(D * D + s4);
    Vec g = q;  // (grad p1 + grad p2) / 2
    g[0] -= (D / S) * sep;  // (D/S) grad D / 2 with grad D = (2 sep, 0)
    return g;
  };
  d.hess_phi = [parts, s4, sep](const Vec& q) {
    auto [p1, p2] = parts(q);
    const double D = p1 - p2;
    const double S = std::sqrt(D * D + s4);
    Mat h = Mat::Identity(2, 2);
    h(0, 0) -= 0.5 * (s4 / (S * S * S)) * (2.0 * sep) * (2.0 * sep);
    return h;
  };
  d.delta0 = delta0 > 0.0 ? delta0 : 0.1;
  // Interior critical point at the origin: phi(0) = (sep^2 - r^2 - blend^2)/2.
  const double phi0 = 0.5 * (sep * sep - r2 - blend * blend);
  if (!(d.delta0 < std::abs(phi0)))
    throw InvalidInputError("peanut delta0 too large: grad phi vanishes in the band");
  const double reach = sep + std::sqrt(r2 + 2.0 * d.delta0 + blend * blend) + 0.1;
  d.box_lo = vec2(-reach, -reach);
  d.box_hi = vec2(reach, reach);
  d.star_shaped = true;
  d.star_center = Vec::Zero(2);
  return d;
}

ImplicitDomain make_quadratic(Mat A, Vec b, double c, double delta0, Vec box_lo, Vec box_hi) {
  const int n = static_cast<int>(b.size());
  if (A.rows() != n || A.cols() != n) throw InvalidInputError("quadratic domain shape mismatch");
  if (!(delta0 > 0.0)) throw InvalidInputError("delta0 must be > 0");
  ImplicitDomain d;
  d.dimension = n;
  Mat As = 0.5 * (A + A.transpose());
  d.phi = [As, b, c](const Vec& q) { return 0.5 * q.dot(As * q) + b.dot(q) + c; };
  d.grad_phi = [As, b](const Vec& q) { return Vec(As * q + b); };
  d.hess_phi = [As](const Vec&) { return As; };
  d.delta0 = delta0;
  d.box_lo = std::move(box_lo);
  d.box_hi = std::move(box_hi);
  return d;
}

Vec boundary_project(const ImplicitDomain& domain, const Vec& q) {
  double f = domain.phi(q);
  if (std::abs(f) > domain.delta0)
    throw OutsideStripError("boundary_project called outside the band |phi| <= delta0");
  Vec x = q;
  const double tol = domain.tol_phi();
  for (int it = 0; it < kMaxProjectionIters; ++it) {
    if (std::abs(f) <= tol) return x;
    const Vec g = domain.grad_phi(x);
    const double g2 = g.squaredNorm();
    if (g2 <= 0.0) throw DegenerateBoundaryError("grad phi vanished during projection");
    x -= (f / g2) * g;
    f = domain.phi(x);
  }
  throw ProjectionFailureError("boundary projection did not converge in 50 iterations");
}

Vec tangent_project(const ImplicitDomain& domain, const Vec& q, const Vec& w) {
  if (std::abs(domain.phi(q)) > 1e3 * domain.tol_phi())
    throw InvalidInputError("tangent_project needs q on the boundary");
  const Vec g = domain.grad_phi(q);
  const Vec n = g / g.norm();
  return w - w.dot(n) * n;
}

double finsler_hessian(const MetricSpec& metric, const ImplicitDomain& domain, const Vec& q,
                       const Vec& v) {
  const double quad = v.dot(domain.hess_phi(q) * v);
  return quad + domain.grad_phi(q).dot(spray(metric, q, v));
}

Vec sample_sublevel(const ImplicitDomain& domain, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vec q(domain.dimension);
  for (int t = 0; t < kMaxRejectionTries; ++t) {
    for (int i = 0; i < domain.dimension; ++i)
      q[i] = domain.box_lo[i] + unif(rng) * (domain.box_hi[i] - domain.box_lo[i]);
    if (domain.phi(q) <= domain.delta0) return q;
  }
  throw InvalidInputError("sublevel sampling failed: box does not intersect the domain?");
}

Vec sample_band(const ImplicitDomain& domain, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vec q(domain.dimension);
  for (int t = 0; t < kMaxRejectionTries; ++t) {
    for (int i = 0; i < domain.dimension; ++i)
      q[i] = domain.box_lo[i] + unif(rng) * (domain.box_hi[i] - domain.box_lo[i]);
    if (std::abs(domain.phi(q)) <= domain.delta0) return q;
  }
  throw InvalidInputError("band sampling failed: no points with |phi| <= delta0 in box");
}

RegionSampler make_strip_sampler(const ImplicitDomain& domain) {
  return [domain](Rng& rng) {
    Vec q = sample_sublevel(domain, rng);
    Vec v = random_unit_vector(domain.dimension, rng);
    return std::pair<Vec, Vec>{std::move(q), std::move(v)};
  };
}

DomainConstants domain_constants(const MetricSpec& metric, const ImplicitDomain& domain,
                                 const BoundsEstimate& bounds, int sample_count,
                                 std::uint64_t seed) {
  if (!(domain.delta0 > 0.0)) throw InvalidInputError("delta0 must be > 0");
  (void)metric;
  Rng rng(seed);
  double k0 = 0.0;
  for (int i = 0; i < sample_count; ++i) {
    const Vec q = sample_band(domain, rng);
    const double g = domain.grad_phi(q).norm();
    if (g == 0.0) throw DegenerateBoundaryError("grad phi vanishes inside the band");
    k0 = std::max(k0, g);
  }
  DomainConstants out;
  out.K0 = k0;
  out.ell = bounds.ell;
  out.delta_m = domain.delta0 * domain.delta0 / (2.0 * bounds.ell * k0 * k0);
  return out;
}

ConvexityScan convexity_scan(const MetricSpec& metric, const ImplicitDomain& domain,
                             int samples, std::uint64_t seed) {
  if (samples < 1) throw InvalidInputError("convexity_scan needs samples >= 1");
  Rng rng(seed);
  ConvexityScan best;
  best.min_H = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    Vec q = sample_band(domain, rng);
    q = boundary_project(domain, q);
    Vec v = tangent_project(domain, q, random_unit_vector(domain.dimension, rng));
    const double nv = v.norm();
    if (nv < 1e-8) {
      --i;
      continue;
    }
    v /= nv;
    const double h = finsler_hessian(metric, domain, q, v);
    if (h < best.min_H) {
      best.min_H = h;
      best.location = q;
      best.direction = v;
    }
  }
  return best;
}

double ray_to_boundary(const ImplicitDomain& domain, const Vec& u) {
  if (!domain.star_shaped)
    throw UnsupportedDomainError("domain has no star-shape certificate");
  const Vec& c = domain.star_center;
  // Bracket the crossing of phi along t -> c + t u, then bisect.
  double lo = 0.0;
  double hi = 1e-3;
  const double t_max = (domain.box_hi - domain.box_lo).norm() + 1.0;
  while (domain.phi(c + hi * u) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > t_max) throw UnsupportedDomainError("ray never left the domain");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (domain.phi(c + mid * u) < 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-15 * (1.0 + hi)) break;
  }
  return 0.5 * (lo + hi);
}

Vec boundary_point_2d(const ImplicitDomain& domain, double theta) {
  if (domain.dimension != 2)
    throw InvalidInputError("boundary_point_2d needs a 2-D domain");
  Vec u(2);
  u << std::cos(theta), std::sin(theta);
  return Vec(domain.star_center + ray_to_boundary(domain, u) * u);
}

}  // namespace ofgc
