#pragma once

#include <vector>

#include "ofgc/curve.hpp"
#include "ofgc/domain.hpp"
#include "ofgc/metric.hpp"
#include "ofgc/penalty.hpp"

namespace ofgc {

enum class ChordClass { OFGC, OTFGC, boundary_touching, constant, unconverged };

const char* to_string(ChordClass c);

struct ChordTols {
  double ortho_tol = 1e-3;     // relative endpoint orthogonality residual
  double tangency_tol = 1e-3;  // |<grad phi, v>| / (|grad phi| |v|) at contact
  double dedup_tol = 1e-2;     // star_dist between normalized representatives
  double geo_tol = 1e-2;       // discrete geodesic residual, relative
  double value_tol(double value) const { return 1e-3 * (1.0 + std::abs(value)); }
};

struct SolveParams {
  int n = 64;
  PenaltyParams penalty;
  ChordTols tols;
  int max_outer = 150;
  double merge_tol = 0.0;       // 0 => 1e-3 * bounding-box diagonal
  double endpoint_step = 0.5;   // initial endpoint line-search step
};

struct ChordResult {
  DiscreteCurve curve;        // constant-speed normalized
  DiscreteCurve solver_curve; // raw penalized minimizer (lambda/contact refer here)
  double energy = 0.0;
  double residual0 = 1.0, residual1 = 1.0;
  std::vector<int> contact_nodes;  // |phi(q_k)| <= contact_tol, endpoints included
  Vec lambda_profile;
  ChordClass classification = ChordClass::unconverged;
  double contact_tol = 0.0;
  double delta_final = 0.0;
  double speed_spread = 1.0;  // relative F-speed spread of `curve`; ~0 once normalized
  bool converged = false;
  bool image_coincident = false;  // same image as another result at another energy
  int otfgc_prefix_end = -1;      // first tangential contact node for OTFGC
  int outer_iterations = 0;
  Vec seed_a, seed_b;

  std::vector<int> interior_contacts() const;
};

struct SearchReport {
  std::vector<ChordResult> all_results;
  std::vector<ChordResult> distinct;
  std::vector<double> critical_values;
  int expected_count = 0;
  bool reversible = true;
  double max_asymmetry = 0.0;
  bool degenerate_family = false;
  int seeds_total = 0;
  int seeds_failed = 0;
};

/// Relative tangential fraction of d_vG at the two endpoints (0 = orthogonal).
std::pair<double, double> orthogonality_residual(const MetricSpec& metric,
                                                 const ImplicitDomain& domain,
                                                 const DiscreteCurve& curve);

/// Free-endpoint chord solve: penalized interior relaxation alternating with
/// projected endpoint descent on the boundary.
ChordResult solve_chord(const MetricSpec& metric, const ImplicitDomain& domain, const Vec& A,
                        const Vec& B, const SolveParams& params);

/// Classification per the residuals / contact structure of an already
/// converged result (fills classification and otfgc_prefix_end).
ChordClass classify(const MetricSpec& metric, const ImplicitDomain& domain, ChordResult& result,
                    const ChordTols& tols);

struct LambdaCheck {
  double discrepancy = 0.0;  // max |formula - lambda| / (1 + max |lambda|)
  double max_formula = 0.0;  // largest curvature-formula value over contacts
};

/// Compare the recovered multiplier against the contact-set curvature formula
/// H_phi(x, x') / (grad phi . g^{-1} grad phi) at every interior contact node.
LambdaCheck lambda_verify(const MetricSpec& metric, const ImplicitDomain& domain,
                          const ChordResult& result);

/// Discrete geodesic residual max_k |q''_k - spray(q_k, v_k)| / (1 + |spray|)
/// over interior nodes (central differences).
double geodesic_residual(const MetricSpec& metric, const DiscreteCurve& curve);

std::vector<ChordResult> geometric_dedup(std::vector<ChordResult> results, bool reversible,
                                         const ChordTols& tols);

SearchReport multistart_search(const MetricSpec& metric, const ImplicitDomain& domain,
                               int boundary_grid, const SolveParams& params, int threads = 0,
                               std::uint64_t seed = 42);

/// Sorted distinct critical values merged within value_tol.
std::vector<double> critical_value_report(const SearchReport& report, const ChordTols& tols);

}  // namespace ofgc
