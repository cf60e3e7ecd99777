#include "ofgc/io.hpp"

#include <cstdio>
#include <fstream>

namespace ofgc {

namespace {

Mat mat_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("expected a matrix (array of arrays)");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j[0].size());
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(j[i].size()) != cols) throw ConfigError("ragged matrix");
    for (int k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

std::string fmt17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

ConformalFactor gaussian_factor(double amplitude, double width, Vec center) {
  const double iw2 = 1.0 / (width * width);
  ConformalFactor f;
  f.phi = [amplitude, iw2, center](const Vec& q) {
    return amplitude * std::exp(-0.5 * (q - center).squaredNorm() * iw2);
  };
  f.grad = [amplitude, iw2, center](const Vec& q) {
    const double p = amplitude * std::exp(-0.5 * (q - center).squaredNorm() * iw2);
    return Vec(-p * iw2 * (q - center));
  };
  f.hess = [amplitude, iw2, center](const Vec& q) {
    const Vec d = q - center;
    const double p = amplitude * std::exp(-0.5 * d.squaredNorm() * iw2);
    Mat h = p * iw2 * iw2 * (d * d.transpose());
    h -= p * iw2 * Mat::Identity(q.size(), q.size());
    return h;
  };
  return f;
}

}  // namespace

Vec vec_from_json(const Json& j) {
  if (!j.is_array()) throw ConfigError("expected a vector (array)");
  Vec v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = j[i].get<double>();
  return v;
}

Json vec_to_json(const Vec& v) {
  Json j = Json::array();
  for (int i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

MetricSpec metric_from_json(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const int n = j.at("dimension").get<int>();
  if (kind == "euclidean") return MetricSpec::euclidean(n);
  if (kind == "randers") {
    Vec beta = vec_from_json(j.at("beta"));
    if (beta.size() != n) throw ConfigError("beta dimension mismatch");
    if (j.contains("base")) return MetricSpec::randers(mat_from_json(j["base"]), beta);
    return MetricSpec::randers(beta);
  }
  if (kind == "pnorm") return MetricSpec::pnorm_metric(n, j.at("p").get<double>());
  if (kind == "riemannian") {
    const Json& g = j.at("g");
    if (g.is_array()) {
      Mat g0 = mat_from_json(g);
      if (g0.rows() != n) throw ConfigError("g dimension mismatch");
      return MetricSpec::riemannian(std::move(g0));
    }
    if (g.is_object() && g.contains("conformal")) {
      const Json& c = g["conformal"];
      const std::string type = c.at("type").get<std::string>();
      if (type == "sphere")
        return MetricSpec::round_sphere_patch(n, c.at("radius").get<double>());
      if (type == "gaussian") {
        Vec center = c.contains("center") ? vec_from_json(c["center"]) : Vec(Vec::Zero(n));
        return MetricSpec::riemannian_conformal(
            n, gaussian_factor(c.at("amplitude").get<double>(), c.at("width").get<double>(),
                               std::move(center)));
      }
      throw ConfigError("unknown conformal type: " + type);
    }
    throw ConfigError("riemannian metric needs a matrix or conformal table under \"g\"");
  }
  throw ConfigError("unknown metric kind: " + kind);
}

ImplicitDomain domain_from_json(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const double delta0 = j.value("delta0", -1.0);
  const Json params = j.value("params", Json::object());
  if (kind == "ball")
    return make_ball(params.value("dimension", 2), params.value("radius", 1.0), delta0);
  if (kind == "ellipse")
    return make_ellipse(params.value("a", 2.0), params.value("b", 1.0), delta0);
  if (kind == "peanut")
    return make_peanut(params.value("sep", 0.7), params.value("radius", 0.8),
                       params.value("blend", 0.39), delta0);
  if (kind == "analytic") {
    if (!(delta0 > 0.0)) throw ConfigError("analytic domain needs delta0 > 0");
    return make_quadratic(mat_from_json(params.at("A")), vec_from_json(params.at("b")),
                          params.at("c").get<double>(), delta0,
                          vec_from_json(params.at("box_lo")), vec_from_json(params.at("box_hi")));
  }
  throw ConfigError("unknown domain kind: " + kind);
}

Json solver_report_to_json(const MetricSpec& metric, const SolverReport& report,
                           const std::string& curve_csv) {
  Json j;
  j["delta"] = report.delta_used;
  j["iterations"] = report.iterations;
  j["grad_norm"] = report.final_grad_norm;
  j["energy"] = energy(metric, report.final_curve);
  j["penalty_integral"] = report.penalty_integral;
  j["energy_constant_residual"] = report.energy_constant_residual;
  j["converged"] = report.converged;
  Json lambda = Json::array();
  for (int i = 0; i < report.lambda_profile.size(); ++i)
    lambda.push_back(report.lambda_profile[i]);
  j["lambda"] = std::move(lambda);
  Json stages = Json::array();
  for (const StageInfo& s : report.stages) {
    Json sj;
    sj["delta"] = s.delta;
    sj["iterations"] = s.iterations;
    sj["grad_norm"] = s.grad_norm;
    sj["penalty_integral"] = s.penalty_integral;
    sj["excursion"] = s.excursion;
    sj["converged"] = s.converged;
    stages.push_back(std::move(sj));
  }
  j["stages"] = std::move(stages);
  j["curve_csv"] = curve_csv;
  return j;
}

Json chord_result_to_json(const ChordResult& result, const std::string& curve_csv) {
  Json j;
  j["classification"] = to_string(result.classification);
  j["energy"] = result.energy;
  j["residual0"] = result.residual0;
  j["residual1"] = result.residual1;
  j["endpoint0"] = vec_to_json(result.curve.node(0));
  j["endpoint1"] = vec_to_json(result.curve.node(result.curve.segments()));
  j["interior_contacts"] = result.interior_contacts().size();
  j["image_coincident"] = result.image_coincident;
  j["converged"] = result.converged;
  j["outer_iterations"] = result.outer_iterations;
  if (result.otfgc_prefix_end >= 0) j["otfgc_prefix_end"] = result.otfgc_prefix_end;
  Json lambda = Json::array();
  for (int i = 0; i < result.lambda_profile.size(); ++i)
    lambda.push_back(result.lambda_profile[i]);
  j["lambda"] = std::move(lambda);
  j["curve_csv"] = curve_csv;
  return j;
}

Json search_report_to_json(const SearchReport& report,
                           const std::vector<std::string>& curve_csvs) {
  Json j;
  j["reversible"] = report.reversible;
  j["max_asymmetry"] = report.max_asymmetry;
  j["expected_count"] = report.expected_count;
  j["distinct_count"] = report.distinct.size();
  j["degenerate_family"] = report.degenerate_family;
  j["seeds_total"] = report.seeds_total;
  j["seeds_failed"] = report.seeds_failed;
  Json values = Json::array();
  for (double v : report.critical_values) values.push_back(v);
  j["critical_values"] = std::move(values);
  Json chords = Json::array();
  for (size_t i = 0; i < report.distinct.size(); ++i)
    chords.push_back(chord_result_to_json(report.distinct[i],
                                          i < curve_csvs.size() ? curve_csvs[i] : ""));
  j["distinct"] = std::move(chords);
  return j;
}

void write_search_summary_csv(const std::string& path, const SearchReport& report) {
  std::ofstream os(path);
  if (!os) throw InvalidInputError("cannot open " + path + " for writing");
  os << "energy,classification,residual0,residual1,image_coincident";
  const int dim = report.distinct.empty() ? 0 : report.distinct.front().curve.dim();
  for (int i = 0; i < dim; ++i) os << ",a" << (i + 1);
  for (int i = 0; i < dim; ++i) os << ",b" << (i + 1);
  os << "\n";
  for (const ChordResult& r : report.distinct) {
    os << fmt17(r.energy) << "," << to_string(r.classification) << "," << fmt17(r.residual0)
       << "," << fmt17(r.residual1) << "," << (r.image_coincident ? 1 : 0);
    const Vec a = r.curve.node(0), b = r.curve.node(r.curve.segments());
    for (int i = 0; i < dim; ++i) os << "," << fmt17(a[i]);
    for (int i = 0; i < dim; ++i) os << "," << fmt17(b[i]);
    os << "\n";
  }
}

}  // namespace ofgc
