#include "ofgc/curve.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ofgc {

namespace {

// A segment counts as zero when shorter than this times the curve scale.
constexpr double kZeroSegmentTol = 1e-14;

double curve_scale(const DiscreteCurve& c) {
  return 1.0 + c.nodes.cwiseAbs().maxCoeff();
}

void check_solver_curve(const DiscreteCurve& c) {
  if (c.is_constant()) return;
  const double tol = kZeroSegmentTol * curve_scale(c);
  for (int k = 0; k < c.segments(); ++k)
    if ((c.nodes.col(k + 1) - c.nodes.col(k)).norm() <= tol)
      throw DegenerateCurveError("zero segment inside a non-constant curve");
}

}  // namespace

DiscreteCurve::DiscreteCurve(Mat node_columns) : nodes(std::move(node_columns)) {
  if (nodes.cols() < kMinSegments + 1)
    throw InvalidInputError("discrete curves need at least 8 segments");
  if (!nodes.allFinite()) throw InvalidInputError("curve nodes must be finite");
}

bool DiscreteCurve::is_constant(double tol) const {
  for (int k = 1; k < static_cast<int>(nodes.cols()); ++k)
    if ((nodes.col(k) - nodes.col(0)).norm() > tol) return false;
  return true;
}

DiscreteCurve line_curve(const Vec& a, const Vec& b, int n) {
  Mat nodes(a.size(), n + 1);
  for (int k = 0; k <= n; ++k) {
    const double s = static_cast<double>(k) / n;
    nodes.col(k) = (1.0 - s) * a + s * b;
  }
  return DiscreteCurve(std::move(nodes));
}

double energy(const MetricSpec& metric, const DiscreteCurve& curve) {
  if (curve.is_constant()) return 0.0;
  check_solver_curve(curve);
  const int n = curve.segments();
  double j = 0.0;
  for (int k = 0; k < n; ++k)
    j += eval_G(metric, curve.midpoint(k), curve.velocity(k));
  return 0.5 * j / n;
}

Mat energy_gradient(const MetricSpec& metric, const DiscreteCurve& curve) {
  const int n = curve.segments();
  Mat grad = Mat::Zero(curve.dim(), n + 1);
  if (curve.is_constant()) return grad;
  check_solver_curve(curve);
  for (int k = 0; k < n; ++k) {
    const FirstOrderJet jet = metric_grad(metric, curve.midpoint(k), curve.velocity(k));
    const Vec dq = (0.25 / n) * jet.dqG;  // 1/(2n) quadrature x 1/2 midpoint chain rule
    const Vec dv = 0.5 * jet.dvG;         // 1/(2n) quadrature x n velocity chain rule
    grad.col(k) += dq - dv;
    grad.col(k + 1) += dq + dv;
  }
  return grad;
}

double star_norm(const Mat& variation) {
  const int n = static_cast<int>(variation.cols()) - 1;
  if (n < 1) throw InvalidInputError("variation needs at least two samples");
  const double ends =
      std::max(variation.col(0).norm(), variation.col(n).norm());
  double deriv2 = 0.0;
  for (int k = 0; k < n; ++k)
    deriv2 += n * (variation.col(k + 1) - variation.col(k)).squaredNorm();
  return ends + std::sqrt(deriv2);
}

double star_dist(const DiscreteCurve& c1, const DiscreteCurve& c2) {
  if (c1.nodes.rows() != c2.nodes.rows() || c1.nodes.cols() != c2.nodes.cols())
    throw InvalidInputError("star_dist needs curves on the same grid");
  const int n = c1.segments();
  const double ends = std::max((c1.node(0) - c2.node(0)).norm(),
                               (c1.node(n) - c2.node(n)).norm());
  double deriv2 = 0.0;
  for (int k = 0; k < n; ++k)
    deriv2 += (c1.velocity(k) - c2.velocity(k)).squaredNorm() / n;
  return ends + std::sqrt(deriv2);
}

DiscreteCurve reverse(const DiscreteCurve& curve) {
  return DiscreteCurve(curve.nodes.rowwise().reverse());
}

DiscreteCurve chord_seed(const ImplicitDomain& domain, const Vec& A, const Vec& B, int n) {
  if (n < kMinSegments) throw InvalidInputError("chord_seed needs n >= 8");
  const double tol = 1e3 * domain.tol_phi();
  if (std::abs(domain.phi(A)) > tol || std::abs(domain.phi(B)) > tol)
    throw InvalidInputError("chord_seed endpoints must lie on the boundary");
  if (!domain.star_shaped)
    throw UnsupportedDomainError("chord_seed needs a star-shape certificate");

  const Vec& c = domain.star_center;
  auto to_ball = [&](const Vec& q) -> Vec {
    const Vec d = q - c;
    const double r = d.norm();
    if (r == 0.0) return Vec::Zero(domain.dimension);
    return d / ray_to_boundary(domain, Vec(d / r));
  };
  auto from_ball = [&](const Vec& y) -> Vec {
    const double r = y.norm();
    if (r == 0.0) return c;
    return Vec(c + ray_to_boundary(domain, Vec(y / r)) * y);
  };

  const Vec ya = to_ball(A);
  const Vec yb = to_ball(B);
  Mat nodes(domain.dimension, n + 1);
  nodes.col(0) = A;
  nodes.col(n) = B;
  for (int k = 1; k < n; ++k) {
    const double s = static_cast<double>(k) / n;
    nodes.col(k) = from_ball((1.0 - s) * ya + s * yb);
  }
  return DiscreteCurve(std::move(nodes));
}

double family_max_energy(const MetricSpec& metric, const ImplicitDomain& domain,
                         int boundary_grid, int n) {
  if (boundary_grid < 1) throw InvalidInputError("family_max_energy needs a grid");
  if (domain.dimension != 2)
    throw UnsupportedDomainError("family sweep implemented for 2-D domains");
  std::vector<Vec> pts(boundary_grid);
  for (int i = 0; i < boundary_grid; ++i)
    pts[i] = boundary_point_2d(domain, 2.0 * M_PI * i / boundary_grid);
  double best = 0.0;
  for (int i = 0; i < boundary_grid; ++i)
    for (int j = 0; j < boundary_grid; ++j) {
      if (i == j) continue;
      best = std::max(best, energy(metric, chord_seed(domain, pts[i], pts[j], n)));
    }
  return best;
}

DiscreteCurve reparametrize_const_speed(const MetricSpec& metric, const DiscreteCurve& curve) {
  if (curve.is_constant())
    throw DegenerateCurveError("cannot reparametrize a constant curve");
  check_solver_curve(curve);
  const int n = curve.segments();
  // Cumulative F-length along the polyline (forward orientation).
  std::vector<double> cum(n + 1, 0.0);
  for (int k = 0; k < n; ++k) {
    const Vec dq = curve.node(k + 1) - curve.node(k);
    cum[k + 1] = cum[k] + eval_F(metric, curve.midpoint(k), dq);
  }
  const double total = cum[n];
  Mat out(curve.dim(), n + 1);
  out.col(0) = curve.node(0);
  out.col(n) = curve.node(n);
  int seg = 0;
  for (int k = 1; k < n; ++k) {
    const double target = total * k / n;
    while (seg < n - 1 && cum[seg + 1] < target) ++seg;
    const double span = cum[seg + 1] - cum[seg];
    const double t = span > 0.0 ? (target - cum[seg]) / span : 0.0;
    out.col(k) = (1.0 - t) * curve.node(seg) + t * curve.node(seg + 1);
  }
  return DiscreteCurve(std::move(out));
}

void write_curve_csv(std::ostream& os, const DiscreteCurve& curve) {
  const int n = curve.segments();
  os << "s";
  for (int i = 0; i < curve.dim(); ++i) os << ",q" << (i + 1);
  os << "\n";
  char buf[32];
  for (int k = 0; k <= n; ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g", static_cast<double>(k) / n);
    os << buf;
    for (int i = 0; i < curve.dim(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", curve.nodes(i, k));
      os << "," << buf;
    }
    os << "\n";
  }
}

void write_curve_csv_file(const std::string& path, const DiscreteCurve& curve) {
  std::ofstream os(path);
  if (!os) throw InvalidInputError("cannot open " + path + " for writing");
  write_curve_csv(os, curve);
}

DiscreteCurve read_curve_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidInputError("empty curve CSV");
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidInputError("curve CSV has no rows");
  const int dim = static_cast<int>(rows[0].size()) - 1;
  Mat nodes(dim, rows.size());
  for (size_t k = 0; k < rows.size(); ++k) {
    if (static_cast<int>(rows[k].size()) != dim + 1)
      throw InvalidInputError("ragged curve CSV");
    for (int i = 0; i < dim; ++i) nodes(i, static_cast<int>(k)) = rows[k][i + 1];
  }
  return DiscreteCurve(std::move(nodes));
}

DiscreteCurve read_curve_csv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidInputError("cannot open " + path);
  return read_curve_csv(is);
}

}  // namespace ofgc
