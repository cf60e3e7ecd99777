#pragma once

#include <string>

#include <json.hpp>

#include "ofgc/chords.hpp"
#include "ofgc/domain.hpp"
#include "ofgc/metric.hpp"
#include "ofgc/penalty.hpp"

namespace ofgc {

using Json = nlohmann::ordered_json;

/// Metric schema:
///   {"kind": "euclidean",  "dimension": N}
///   {"kind": "randers",    "dimension": N, "beta": [...], "base": [[...]]?}
///   {"kind": "pnorm",      "dimension": N, "p": number}
///   {"kind": "riemannian", "dimension": N, "g": [[...]] |
///        {"conformal": {"type": "sphere", "radius": r}} |
///        {"conformal": {"type": "gaussian", "amplitude": a, "width": w, "center": [...]}}}
MetricSpec metric_from_json(const Json& j);

/// Domain schema: {"kind": "ball"|"ellipse"|"peanut"|"analytic",
///                 "params": {...}, "delta0": number?}
///   ball:     params {"dimension": n, "radius": r}
///   ellipse:  params {"a": a, "b": b}
///   peanut:   params {"sep": s, "radius": r, "blend": w}?
///   analytic: params {"A": [[...]], "b": [...], "c": c,
///                     "box_lo": [...], "box_hi": [...]} (phi quadratic)
ImplicitDomain domain_from_json(const Json& j);

Json solver_report_to_json(const MetricSpec& metric, const SolverReport& report,
                           const std::string& curve_csv);

Json chord_result_to_json(const ChordResult& result, const std::string& curve_csv);

Json search_report_to_json(const SearchReport& report,
                           const std::vector<std::string>& curve_csvs);

void write_search_summary_csv(const std::string& path, const SearchReport& report);

Vec vec_from_json(const Json& j);
Json vec_to_json(const Vec& v);

}  // namespace ofgc
