#pragma once

#include <string>
#include <vector>

#include "ofgc/domain.hpp"
#include "ofgc/metric.hpp"

namespace ofgc {

struct CheckRow {
  std::string name;
  bool pass = false;
  double worst = 0.0;   // worst observed error, in the check's own units
  double tol = 0.0;
  int samples = 0;
  int skipped = 0;      // smoothness-boundary samples refused by the metric
};

/// Property suites over sampled points of the domain: homogeneity, Euler
/// identities, tensor positivity, analytic-vs-finite-difference gradients,
/// spray homogeneity, energy-gradient consistency, chi identity, geodesic
/// energy conservation, reversal involution, projection idempotence.
std::vector<CheckRow> run_invariant_suite(const MetricSpec& metric,
                                          const ImplicitDomain& domain,
                                          std::uint64_t seed = 42);

bool all_pass(const std::vector<CheckRow>& rows);

}  // namespace ofgc
