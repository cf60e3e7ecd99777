#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ofgc/chords.hpp"
#include "ofgc/io.hpp"
#include "ofgc/verify.hpp"

namespace fs = std::filesystem;
using ofgc::Json;

namespace {

struct CliOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  int threads = -1;
  long long seed = -1;
};

Json load_config(const CliOptions& opts) {
  Json config;
  if (!opts.config_path.empty()) {
    std::ifstream is(opts.config_path);
    if (!is) throw ofgc::ConfigError("cannot open config: " + opts.config_path);
    try {
      config = Json::parse(is);
    } catch (const std::exception& e) {
      throw ofgc::ConfigError(std::string("config parse error: ") + e.what());
    }
  }
  for (const std::string& kv : opts.overrides) {
    const size_t eq = kv.find('=');
    if (eq == std::string::npos) throw ofgc::ConfigError("--set expects key=value: " + kv);
    const std::string key = kv.substr(0, eq);
    const std::string raw = kv.substr(eq + 1);
    Json value;
    try {
      value = Json::parse(raw);
    } catch (...) {
      value = raw;  // bare strings allowed
    }
    Json* node = &config;
    size_t start = 0;
    for (;;) {
      const size_t dot = key.find('.', start);
      const std::string part = key.substr(start, dot - start);
      if (part.empty()) throw ofgc::ConfigError("empty path segment in --set " + kv);
      if (dot == std::string::npos) {
        (*node)[part] = value;
        break;
      }
      node = &(*node)[part];
      start = dot + 1;
    }
  }
  if (opts.threads >= 0) config["threads"] = opts.threads;
  if (opts.seed >= 0) config["seed"] = opts.seed;
  if (!opts.out_dir.empty()) config["out_dir"] = opts.out_dir;
  return config;
}

struct Problem {
  ofgc::MetricSpec metric;
  ofgc::ImplicitDomain domain;
  ofgc::SolveParams params;
  std::uint64_t seed = 42;
  int threads = 0;
  fs::path out_dir;
};

Problem build_problem(const Json& config) {
  if (!config.contains("metric")) throw ofgc::ConfigError("config needs a \"metric\" block");
  if (!config.contains("domain")) throw ofgc::ConfigError("config needs a \"domain\" block");
  Problem p{ofgc::metric_from_json(config["metric"]), ofgc::domain_from_json(config["domain"]),
            {}, 42, 0, {}};
  p.params.n = config.value("n", 64);
  if (p.params.n < ofgc::kMinSegments) throw ofgc::ConfigError("n must be >= 8");
  p.seed = config.value("seed", 42ull);
  p.threads = config.value("threads", 0);
  p.out_dir = config.value("out_dir", std::string("out"));
  if (config.contains("penalty")) {
    const Json& pj = config["penalty"];
    if (pj.contains("schedule"))
      p.params.penalty.delta_schedule = pj["schedule"].get<std::vector<double>>();
    p.params.penalty.grad_tol = pj.value("grad_tol", 0.0);
    p.params.penalty.max_iters = pj.value("max_iters", 20000);
    p.params.penalty.shrink = pj.value("shrink", 0.5);
    p.params.penalty.sufficient_decrease = pj.value("sufficient_decrease", 1e-4);
    const std::string method = pj.value("method", "ncg");
    if (method == "gd")
      p.params.penalty.method = ofgc::DescentMethod::gradient;
    else if (method == "ncg")
      p.params.penalty.method = ofgc::DescentMethod::conjugate_gradient;
    else
      throw ofgc::ConfigError("penalty.method must be \"gd\" or \"ncg\"");
  }
  if (config.contains("tols")) {
    const Json& tj = config["tols"];
    p.params.tols.ortho_tol = tj.value("ortho_tol", p.params.tols.ortho_tol);
    p.params.tols.tangency_tol = tj.value("tangency_tol", p.params.tols.tangency_tol);
    p.params.tols.dedup_tol = tj.value("dedup_tol", p.params.tols.dedup_tol);
    p.params.tols.geo_tol = tj.value("geo_tol", p.params.tols.geo_tol);
  }
  p.params.max_outer = config.value("max_outer", p.params.max_outer);
  return p;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw ofgc::ConfigError("cannot write " + path.string());
  os << text;
}

int run_solve(const Json& config) {
  Problem p = build_problem(config);
  if (!config.contains("solve") || !config["solve"].contains("A") ||
      !config["solve"].contains("B"))
    throw ofgc::ConfigError("solve needs solve.A and solve.B seed endpoints");
  const ofgc::Vec A = ofgc::vec_from_json(config["solve"]["A"]);
  const ofgc::Vec B = ofgc::vec_from_json(config["solve"]["B"]);
  fs::create_directories(p.out_dir);
  const ofgc::ChordResult result = ofgc::solve_chord(p.metric, p.domain, A, B, p.params);
  const std::string csv = (p.out_dir / "chord.csv").string();
  ofgc::write_curve_csv_file(csv, result.curve);
  write_text(p.out_dir / "solve_report.json",
             ofgc::chord_result_to_json(result, "chord.csv").dump(2) + "\n");
  std::cout << "classification: " << ofgc::to_string(result.classification)
            << "  energy: " << result.energy << "  residuals: (" << result.residual0 << ", "
            << result.residual1 << ")\n";
  const bool ok = result.classification == ofgc::ChordClass::OFGC ||
                  result.classification == ofgc::ChordClass::OTFGC;
  return ok ? 0 : 2;
}

int run_search(const Json& config) {
  Problem p = build_problem(config);
  const int grid = config.contains("search") ? config["search"].value("boundary_grid", 16) : 16;
  fs::create_directories(p.out_dir);
  const ofgc::SearchReport report =
      ofgc::multistart_search(p.metric, p.domain, grid, p.params, p.threads, p.seed);
  std::vector<std::string> csvs;
  for (size_t i = 0; i < report.distinct.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "chord_%03zu.csv", i);
    ofgc::write_curve_csv_file((p.out_dir / name).string(), report.distinct[i].curve);
    csvs.emplace_back(name);
  }
  ofgc::write_search_summary_csv((p.out_dir / "summary.csv").string(), report);
  write_text(p.out_dir / "search_report.json",
             ofgc::search_report_to_json(report, csvs).dump(2) + "\n");
  std::cout << "distinct chords: " << report.distinct.size()
            << " (expected >= " << report.expected_count << ")";
  if (report.degenerate_family) std::cout << " [degenerate critical family]";
  std::cout << "\ncritical values:";
  for (double v : report.critical_values) std::cout << " " << v;
  std::cout << "\n";
  const bool ok = static_cast<int>(report.distinct.size()) >= report.expected_count ||
                  report.degenerate_family;
  return ok ? 0 : 3;
}

int run_verify(const Json& config) {
  Problem p = build_problem(config);
  const std::vector<ofgc::CheckRow> rows = ofgc::run_invariant_suite(p.metric, p.domain, p.seed);
  std::printf("%-32s %-6s %-12s %-12s %s\n", "invariant", "status", "worst", "tol", "skipped");
  for (const ofgc::CheckRow& r : rows)
    std::printf("%-32s %-6s %-12.3e %-12.3e %d\n", r.name.c_str(), r.pass ? "pass" : "FAIL",
                r.worst, r.tol, r.skipped);
  if (!ofgc::all_pass(rows)) {
    for (const ofgc::CheckRow& r : rows)
      if (!r.pass) std::printf("failed invariant: %s\n", r.name.c_str());
    return 4;
  }
  return 0;
}

int run_sweep(const Json& config) {
  Problem p = build_problem(config);
  if (p.domain.dimension != 2)
    throw ofgc::ConfigError("sweep needs a 2-D domain (no boundary parametrization otherwise)");
  const int grid = config.contains("sweep") ? config["sweep"].value("boundary_grid", 32) : 32;
  fs::create_directories(p.out_dir);

  std::vector<ofgc::Vec> pts(grid);
  std::vector<double> angles(grid);
  for (int i = 0; i < grid; ++i) {
    angles[i] = 2.0 * M_PI * i / grid;
    pts[i] = ofgc::boundary_point_2d(p.domain, angles[i]);
  }
  double delta_big = 0.0;
  {
    std::ofstream os(p.out_dir / "sweep.csv");
    os << "theta_a,theta_b,energy\n";
    char buf[96];
    for (int i = 0; i < grid; ++i)
      for (int j = 0; j < grid; ++j) {
        const double e =
            i == j ? 0.0
                   : ofgc::energy(p.metric,
                                  ofgc::chord_seed(p.domain, pts[i], pts[j], p.params.n));
        delta_big = std::max(delta_big, e);
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", angles[i], angles[j], e);
        os << buf;
      }
  }
  ofgc::Rng rng(p.seed);
  const ofgc::BoundsEstimate bounds =
      ofgc::estimate_bounds(p.metric, ofgc::make_strip_sampler(p.domain), 1000, rng);
  const ofgc::DomainConstants consts =
      ofgc::domain_constants(p.metric, p.domain, bounds, 10000, p.seed);
  Json j;
  j["delta_m"] = consts.delta_m;
  j["delta_M"] = delta_big;
  j["K0"] = consts.K0;
  j["ell"] = bounds.ell;
  write_text(p.out_dir / "constants.json", j.dump(2) + "\n");
  std::cout << "delta_m: " << consts.delta_m << "  delta_M: " << delta_big << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Orthogonal Finsler geodesic chords: penalized solves, multiplicity search,"
               " invariant verification, seed-family sweeps"};
  app.require_subcommand(1);
  CliOptions opts;
  app.add_option("--config", opts.config_path, "JSON configuration file");
  app.add_option("--set", opts.overrides, "dotted-path config overrides key=value");
  app.add_option("--out", opts.out_dir, "output directory");
  app.add_option("--threads", opts.threads, "worker threads (0 = hardware)");
  app.add_option("--seed", opts.seed, "RNG seed");

  auto* solve = app.add_subcommand("solve", "solve one chord from explicit seed endpoints");
  auto* search = app.add_subcommand("search", "multistart multiplicity search");
  auto* verify = app.add_subcommand("verify", "run the invariant suites");
  auto* sweep = app.add_subcommand("sweep", "seed-family energy landscape and constants");

  CLI11_PARSE(app, argc, argv);

  try {
    const Json config = load_config(opts);
    if (solve->parsed()) return run_solve(config);
    if (search->parsed()) return run_search(config);
    if (verify->parsed()) return run_verify(config);
    if (sweep->parsed()) return run_sweep(config);
  } catch (const ofgc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const ofgc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
