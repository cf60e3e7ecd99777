#include "ofgc/chords.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

namespace ofgc {

namespace {

Vec end_velocity(const DiscreteCurve& c, bool at_start) {
  const int n = c.segments();
  return at_start ? c.velocity(0) : c.velocity(n - 1);
}

// Central-difference velocity at an interior node.
Vec central_velocity(const DiscreteCurve& c, int k) {
  const double n = c.segments();
  return 0.5 * n * (c.node(k + 1) - c.node(k - 1));
}

std::vector<int> contacts_of(const ImplicitDomain& domain, const DiscreteCurve& c,
                             double contact_tol) {
  std::vector<int> out;
  for (int k = 0; k <= c.segments(); ++k)
    if (std::abs(domain.phi(c.node(k))) <= contact_tol) out.push_back(k);
  return out;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int i) { return parent[i] == i ? i : parent[i] = find(parent[i]); }
  void unite(int i, int j) { parent[find(i)] = find(j); }
};

double speed_spread_of(const MetricSpec& metric, const DiscreteCurve& c) {
  if (c.is_constant()) return 0.0;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int k = 0; k < c.segments(); ++k) {
    const double f = eval_F(metric, c.midpoint(k), c.velocity(k));
    lo = std::min(lo, f);
    hi = std::max(hi, f);
  }
  return (hi - lo) / hi;
}

}  // namespace

const char* to_string(ChordClass c) {
  switch (c) {
    case ChordClass::OFGC: return "OFGC";
    case ChordClass::OTFGC: return "OTFGC";
    case ChordClass::boundary_touching: return "boundary_touching";
    case ChordClass::constant: return "constant";
    case ChordClass::unconverged: return "unconverged";
  }
  return "?";
}

std::vector<int> ChordResult::interior_contacts() const {
  std::vector<int> out;
  const int n = solver_curve.segments();
  for (int k : contact_nodes)
    if (k > 0 && k < n) out.push_back(k);
  return out;
}

std::pair<double, double> orthogonality_residual(const MetricSpec& metric,
                                                 const ImplicitDomain& domain,
                                                 const DiscreteCurve& curve) {
  const int n = curve.segments();
  const double tol = 1e3 * domain.tol_phi();
  if (std::abs(domain.phi(curve.node(0))) > tol ||
      std::abs(domain.phi(curve.node(n))) > tol)
    throw InvalidInputError("orthogonality_residual needs boundary endpoints");

  auto residual = [&](const Vec& q, const Vec& v) {
    if (v.norm() == 0.0) throw DegenerateCurveError("zero endpoint velocity");
    const Vec w = metric_grad(metric, q, v).dvG;
    return tangent_project(domain, q, w).norm() / w.norm();
  };
  return {residual(curve.node(0), end_velocity(curve, true)),
          residual(curve.node(n), end_velocity(curve, false))};
}

double geodesic_residual(const MetricSpec& metric, const DiscreteCurve& curve) {
  const int n = curve.segments();
  const double n2 = static_cast<double>(n) * n;
  double worst = 0.0;
  for (int k = 1; k < n; ++k) {
    const Vec acc = n2 * (curve.node(k + 1) - 2.0 * curve.node(k) + curve.node(k - 1));
    const Vec s = spray(metric, curve.node(k), central_velocity(curve, k));
    worst = std::max(worst, (acc - s).norm() / (1.0 + s.norm()));
  }
  return worst;
}

ChordClass classify(const MetricSpec& metric, const ImplicitDomain& domain, ChordResult& result,
                    const ChordTols& tols) {
  if (!result.converged) {
    result.classification = ChordClass::unconverged;
    return result.classification;
  }
  if (result.energy <= tols.value_tol(result.energy)) {
    result.classification = ChordClass::constant;
    return result.classification;
  }
  const std::vector<int> inner = result.interior_contacts();
  if (result.residual0 <= tols.ortho_tol && result.residual1 <= tols.ortho_tol &&
      inner.empty()) {
    result.classification = ChordClass::OFGC;
    return result.classification;
  }
  if (result.residual0 <= tols.ortho_tol && !inner.empty()) {
    const int k = inner.front();
    const Vec v = central_velocity(result.solver_curve, k);
    const Vec g = domain.grad_phi(result.solver_curve.node(k));
    if (std::abs(g.dot(v)) <= tols.tangency_tol * g.norm() * v.norm()) {
      result.otfgc_prefix_end = k;
      result.classification = ChordClass::OTFGC;
      return result.classification;
    }
  }
  (void)metric;
  result.classification = ChordClass::boundary_touching;
  return result.classification;
}

LambdaCheck lambda_verify(const MetricSpec& metric, const ImplicitDomain& domain,
                          const ChordResult& result) {
  const std::vector<int> inner = result.interior_contacts();
  if (inner.empty()) throw NoContactError("result has no interior contact nodes");
  LambdaCheck check;
  check.max_formula = -std::numeric_limits<double>::infinity();
  double max_lambda = 0.0;
  for (int k : inner) max_lambda = std::max(max_lambda, std::abs(result.lambda_profile[k]));
  for (int k : inner) {
    const Vec q = result.solver_curve.node(k);
    const Vec v = central_velocity(result.solver_curve, k);
    const double h = finsler_hessian(metric, domain, q, v);
    const Vec gp = domain.grad_phi(q);
    const Mat g = fundamental_tensor(metric, q, v);
    const double denom = gp.dot(g.ldlt().solve(gp));
    const double formula = h / denom;
    check.max_formula = std::max(check.max_formula, formula);
    check.discrepancy = std::max(
        check.discrepancy, std::abs(formula - result.lambda_profile[k]) / (1.0 + max_lambda));
  }
  return check;
}

ChordResult solve_chord(const MetricSpec& metric, const ImplicitDomain& domain, const Vec& A,
                        const Vec& B, const SolveParams& params) {
  ChordResult result;
  result.seed_a = A;
  result.seed_b = B;
  const double merge_tol =
      params.merge_tol > 0.0 ? params.merge_tol
                             : 1e-3 * (domain.box_hi - domain.box_lo).norm();
  if ((A - B).norm() <= merge_tol)
    throw InvalidInputError("solve_chord needs distinct endpoints");

  PenaltyParams penalty = params.penalty;
  if (penalty.delta_schedule.empty()) penalty.delta_schedule = default_schedule(domain.delta0);
  const double delta_final = penalty.delta_schedule.back();
  PenaltyParams tail = penalty;
  tail.delta_schedule = {delta_final};
  const double grad_tol = penalty.grad_tol > 0.0 ? penalty.grad_tol : 1e-6 * params.n;

  result.delta_final = delta_final;
  result.contact_tol = 2.0 * delta_final;

  DiscreteCurve x = chord_seed(domain, boundary_project(domain, A), boundary_project(domain, B),
                               params.n);
  SolverReport rep = continuation(metric, domain, penalty, x);
  x = rep.final_curve;

  auto finish = [&](bool converged, int outer) {
    result.converged = converged;
    result.outer_iterations = outer;
    result.solver_curve = x;
    result.curve = x.is_constant() ? x : reparametrize_const_speed(metric, x);
    result.speed_spread = speed_spread_of(metric, result.curve);
    result.energy = energy(metric, result.curve);
    result.lambda_profile = lambda_recover(domain, delta_final, x);
    result.contact_nodes = contacts_of(domain, x, result.contact_tol);
    if (!x.is_constant()) {
      auto [r0, r1] = orthogonality_residual(metric, domain, x);
      result.residual0 = r0;
      result.residual1 = r1;
    } else {
      result.residual0 = result.residual1 = 0.0;
    }
    classify(metric, domain, result, params.tols);
    return result;
  };

  double fx = penalized_energy(metric, domain, delta_final, x);
  for (int outer = 0; outer < params.max_outer; ++outer) {
    const int n = x.segments();
    if ((x.node(0) - x.node(n)).norm() <= merge_tol) {
      // Endpoints merged: collapse to the constant curve at the midpoint.
      Vec p = boundary_project(domain, Vec(0.5 * (x.node(0) + x.node(n))));
      x = DiscreteCurve(p.replicate(1, n + 1));
      return finish(true, outer);
    }

    const Mat grad = energy_gradient(metric, x);
    const Vec d0 = -tangent_project(domain, x.node(0), grad.col(0));
    const Vec d1 = -tangent_project(domain, x.node(n), grad.col(n));

    Mat update = Mat::Zero(x.dim(), n + 1);
    update.col(0) = d0;
    update.col(n) = d1;
    if (star_norm(update) <= grad_tol && rep.converged) return finish(true, outer);

    const double slope = -(d0.squaredNorm() + d1.squaredNorm());
    double alpha = params.endpoint_step / (1.0 + std::sqrt(-slope));
    bool accepted = false;
    for (int ls = 0; ls < 40 && !accepted; ++ls, alpha *= penalty.shrink) {
      DiscreteCurve trial = x;
      try {
        trial.nodes.col(0) = boundary_project(domain, Vec(x.node(0) + alpha * d0));
        trial.nodes.col(n) = boundary_project(domain, Vec(x.node(n) + alpha * d1));
      } catch (const OutsideStripError&) {
        continue;
      } catch (const ProjectionFailureError&) {
        continue;
      }
      SolverReport trial_rep;
      try {
        trial_rep = continuation(metric, domain, tail, trial);
      } catch (const Error&) {
        continue;
      }
      const double ft =
          penalized_energy(metric, domain, delta_final, trial_rep.final_curve);
      if (ft < fx + penalty.sufficient_decrease * alpha * slope) {
        x = trial_rep.final_curve;
        rep = trial_rep;
        fx = ft;
        accepted = true;
      }
    }
    if (!accepted) return finish(rep.converged, outer);
  }
  return finish(false, params.max_outer);
}

std::vector<ChordResult> geometric_dedup(std::vector<ChordResult> results, bool reversible,
                                         const ChordTols& tols) {
  const int m = static_cast<int>(results.size());
  if (m == 0) return results;
  for (const ChordResult& r : results)
    if (r.speed_spread > 2e-2)
      throw InvalidInputError("geometric_dedup needs constant-speed normalized results");
  UnionFind uf(m);
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const double direct = star_dist(results[i].curve, results[j].curve);
      if (direct <= tols.dedup_tol) {
        uf.unite(i, j);
        continue;
      }
      const double reversed = star_dist(results[i].curve, reverse(results[j].curve));
      if (reversed <= tols.dedup_tol) {
        if (reversible) {
          uf.unite(i, j);
        } else {
          const double tol =
              std::max(tols.value_tol(results[i].energy), tols.value_tol(results[j].energy));
          if (std::abs(results[i].energy - results[j].energy) <= tol) {
            uf.unite(i, j);
          } else {
            results[i].image_coincident = true;
            results[j].image_coincident = true;
          }
        }
      }
    }
  }
  std::vector<int> rep_of(m, -1);
  std::vector<ChordResult> out;
  for (int i = 0; i < m; ++i) {
    const int root = uf.find(i);
    if (rep_of[root] < 0) {
      rep_of[root] = static_cast<int>(out.size());
      out.push_back(results[i]);
    } else if (results[i].energy < out[rep_of[root]].energy) {
      const bool flag = out[rep_of[root]].image_coincident || results[i].image_coincident;
      out[rep_of[root]] = results[i];
      out[rep_of[root]].image_coincident = flag;
    } else {
      out[rep_of[root]].image_coincident =
          out[rep_of[root]].image_coincident || results[i].image_coincident;
    }
  }
  std::sort(out.begin(), out.end(),
            [](const ChordResult& a, const ChordResult& b) { return a.energy < b.energy; });
  return out;
}

SearchReport multistart_search(const MetricSpec& metric, const ImplicitDomain& domain,
                               int boundary_grid, const SolveParams& params, int threads,
                               std::uint64_t seed) {
  if (boundary_grid < 4) throw InvalidInputError("multistart_search needs boundary_grid >= 4");

  SearchReport report;
  {
    Rng rng(seed);
    const RegionSampler sampler = make_strip_sampler(domain);
    std::vector<std::pair<Vec, Vec>> samples;
    samples.reserve(64);
    for (int i = 0; i < 64; ++i) samples.push_back(sampler(rng));
    auto [rev, asym] = is_reversible(metric, samples);
    report.reversible = rev;
    report.max_asymmetry = asym;
    if (rev != metric.declared_reversible)
      throw InvalidInputError("declared_reversible contradicts sampled asymmetry");
  }
  report.expected_count = report.reversible ? domain.dimension : 2;

  std::vector<Vec> pts(boundary_grid);
  if (domain.dimension == 2) {
    for (int i = 0; i < boundary_grid; ++i)
      pts[i] = boundary_point_2d(domain, 2.0 * M_PI * i / boundary_grid);
  } else {
    Rng rng(seed + 1);
    for (int i = 0; i < boundary_grid; ++i)
      pts[i] = boundary_project(domain, sample_band(domain, rng));
  }

  std::vector<std::pair<int, int>> seeds;
  for (int i = 0; i < boundary_grid; ++i)
    for (int j = report.reversible ? i + 1 : 0; j < boundary_grid; ++j)
      if (i != j) seeds.emplace_back(i, j);
  report.seeds_total = static_cast<int>(seeds.size());

  std::vector<std::optional<ChordResult>> results(seeds.size());
  std::atomic<int> failures{0};
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const size_t idx = next.fetch_add(1);
      if (idx >= seeds.size()) return;
      try {
        results[idx] =
            solve_chord(metric, domain, pts[seeds[idx].first], pts[seeds[idx].second], params);
      } catch (const Error&) {
        failures.fetch_add(1);
      }
    }
  };
  int nthreads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  nthreads = std::max(1, std::min<int>(nthreads, static_cast<int>(seeds.size())));
  {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  report.seeds_failed = failures.load();

  for (auto& r : results) {
    if (!r) continue;
    if (r->classification == ChordClass::OFGC || r->classification == ChordClass::OTFGC)
      report.all_results.push_back(std::move(*r));
  }
  std::sort(report.all_results.begin(), report.all_results.end(),
            [](const ChordResult& a, const ChordResult& b) {
              if (a.energy != b.energy) return a.energy < b.energy;
              for (int i = 0; i < a.seed_a.size(); ++i)
                if (a.seed_a[i] != b.seed_a[i]) return a.seed_a[i] < b.seed_a[i];
              for (int i = 0; i < a.seed_b.size(); ++i)
                if (a.seed_b[i] != b.seed_b[i]) return a.seed_b[i] < b.seed_b[i];
              return false;
            });

  report.distinct = geometric_dedup(report.all_results, report.reversible, params.tols);
  report.critical_values = critical_value_report(report, params.tols);

  // A critical manifold rather than isolated chords: many pairwise-distinct
  // representatives at one energy level. Multiplicity counting is meaningless
  // there and the report says so.
  for (size_t i = 0; i < report.distinct.size();) {
    size_t j = i;
    while (j < report.distinct.size() &&
           std::abs(report.distinct[j].energy - report.distinct[i].energy) <=
               params.tols.value_tol(report.distinct[i].energy))
      ++j;
    if (j - i >= 5) report.degenerate_family = true;
    i = j > i ? j : i + 1;
  }
  return report;
}

std::vector<double> critical_value_report(const SearchReport& report, const ChordTols& tols) {
  if (report.distinct.empty())
    throw InvalidInputError("critical_value_report needs a nonempty distinct list");
  std::vector<double> values;
  for (const ChordResult& r : report.distinct) values.push_back(r.energy);
  std::sort(values.begin(), values.end());
  std::vector<double> merged;
  for (double v : values) {
    if (merged.empty() || v - merged.back() > tols.value_tol(v))
      merged.push_back(v);
  }
  return merged;
}

}  // namespace ofgc
