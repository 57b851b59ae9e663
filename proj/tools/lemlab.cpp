#include <CLI11.hpp>
#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lemlab/io.hpp"
#include "lemlab/scenario.hpp"
#include "lemlab/theorem.hpp"
#include "lemlab/verify.hpp"

namespace {

using namespace lemlab;

int effective_jobs(int jobs) {
#ifdef _OPENMP
  return jobs > 0 ? jobs : omp_get_max_threads();
#else
  (void)jobs;
  return 1;
#endif
}

int run_evolve(const std::string& config_path, const std::string& out_override) {
  ScenarioConfig cfg = load_scenario(config_path);
  if (!out_override.empty()) cfg.out_dir = out_override;

  const LaurentMap map0 = initial_map(cfg);
  if (cfg.M < 4 * (map0.order() + 1))
    throw UsageError("config: grid.M too small for the initial map order " +
                     std::to_string(map0.order()));
  const int n_cols = std::max(cfg.N, map0.order());

  FlowOptions fopt;
  fopt.cusp_margin_rel = cfg.tol_cusp;
  fopt.max_order = std::min(std::max(cfg.N, map0.order()), cfg.M / 4 - 1);

  std::vector<MomentVector> mv;
  const Observer track = [&](const FlowState& s) {
    mv.push_back(moments(sample_boundary(s.map, cfg.M), cfg.K));
  };
  const Observer observers[] = {track};

  FlowState s0;
  s0.map = map0;
  const Trajectory traj = evolve(std::move(s0), cfg.T, cfg.dt, observers, fopt);

  std::filesystem::create_directories(cfg.out_dir);
  io::write_file(cfg.out_dir + "/trajectory.csv",
                 io::trajectory_csv(traj.states, mv, n_cols, cfg.K));
  io::write_file(cfg.out_dir + "/events.json", io::events_json(traj.events));
  if (cfg.svg_stride > 0 && !traj.states.empty()) {
    std::vector<Curve> snaps;
    for (std::size_t i = 0; i < traj.states.size(); i += std::size_t(cfg.svg_stride))
      snaps.push_back(sample_boundary(traj.states[i].map, cfg.M));
    if ((traj.states.size() - 1) % std::size_t(cfg.svg_stride) != 0)
      snaps.push_back(sample_boundary(traj.states.back().map, cfg.M));
    io::write_file(cfg.out_dir + "/boundaries.svg", io::boundary_family_svg(snaps));
  }
  logging::info("evolve: wrote " + cfg.out_dir + "/trajectory.csv (" +
                std::to_string(traj.states.size()) + " states, " +
                std::to_string(traj.events.size()) + " events)");
  return traj.events.empty() ? 0 : 1;
}

int run_fit(const std::string& curve_path, int degree, int restarts, std::uint64_t seed,
            const std::string& out_path) {
  if (degree < 1) throw UsageError("fit: --degree must be >= 1");
  const Curve curve = io::curve_from_csv(io::read_file(curve_path));
  const DefectReport rep = defect_report(curve, degree, restarts, seed);
  const std::string json = io::defect_report_json(rep);
  if (out_path.empty())
    std::fputs(json.c_str(), stdout);
  else
    io::write_file(out_path, json);
  return 0;
}

// Node list grammar: "scale:(re,im)[^mult](re,im)[^mult]..."
LemPoly parse_poly_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw UsageError("poly spec: expected `scale:(re,im)[^k]...`, got " + spec);
  double scale = 0.0;
  try {
    scale = std::stod(spec.substr(0, colon));
  } catch (const std::exception&) {
    throw UsageError("poly spec: bad scale in " + spec);
  }
  std::vector<cplx> nodes;
  std::vector<int> mults;
  std::size_t i = colon + 1;
  while (i < spec.size()) {
    if (std::isspace(static_cast<unsigned char>(spec[i]))) {
      ++i;
      continue;
    }
    if (spec[i] != '(') throw UsageError("poly spec: expected `(` at position " + std::to_string(i));
    const auto close = spec.find(')', i);
    if (close == std::string::npos) throw UsageError("poly spec: unbalanced parenthesis");
    const std::string body = spec.substr(i + 1, close - i - 1);
    double re = 0.0, im = 0.0;
    if (std::sscanf(body.c_str(), "%lf,%lf", &re, &im) != 2)
      throw UsageError("poly spec: bad node `" + body + "`");
    int mult = 1;
    i = close + 1;
    if (i < spec.size() && spec[i] == '^') {
      std::size_t used = 0;
      mult = std::stoi(spec.substr(i + 1), &used);
      i += 1 + used;
    }
    nodes.emplace_back(re, im);
    mults.push_back(mult);
  }
  if (nodes.empty()) throw UsageError("poly spec: no nodes");
  return LemPoly(scale, std::move(nodes), std::move(mults));
}

int run_trace(const std::string& poly_spec, int samples, const std::string& out_path) {
  const LemPoly p = parse_poly_spec(poly_spec);
  const Curve curve = trace_lemniscate(p, samples);
  const std::string csv = io::curve_csv(curve);
  if (out_path.empty())
    std::fputs(csv.c_str(), stdout);
  else
    io::write_file(out_path, csv);
  return 0;
}

int run_verify(const std::string& suite) {
  const auto checks = verify::run_suite(suite);
  std::fputs(io::checks_json(checks).c_str(), stdout);
  return verify::all_pass(checks) ? 0 : 1;
}

struct SweepRow {
  int n = 0;
  double rho = 0.0;
  double defect_slope = 0.0;
  double timerev_sup = 0.0;
  bool has_cusp = false;
  double cusp_t = 0.0;
  std::string status = "ok";
};

int run_sweep(const std::string& config_path, int jobs) {
  const ScenarioConfig cfg = load_scenario(config_path);
  if (cfg.sweep_rho.empty() || cfg.sweep_n.empty())
    throw UsageError("config: sweep.rho and sweep.n must be non-empty for `lemlab sweep`");

  struct GridPoint {
    int n;
    double rho;
  };
  std::vector<GridPoint> grid;
  for (int n : cfg.sweep_n)
    for (double rho : cfg.sweep_rho) grid.push_back({n, rho});

  std::vector<SweepRow> rows(grid.size());
  const int nthreads = effective_jobs(jobs);
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
  for (long i = 0; i < long(grid.size()); ++i) {
    SweepRow row;
    row.n = grid[std::size_t(i)].n;
    row.rho = grid[std::size_t(i)].rho;
    try {
      const LemPoly p0 = verify::star_family(row.n, row.rho);
      DestructionOptions opt;
      opt.M = cfg.M;
      opt.restarts = cfg.fit_restarts;
      opt.seed = cfg.fit_seed;
      opt.flow.cusp_margin_rel = cfg.tol_cusp;
      const auto series = destruction_experiment(p0, cfg.T, cfg.dt, opt);
      row.timerev_sup =
          time_reversal_residual(p0, trace_lemniscate(p0, cfg.M)).sup;
      if (series.points.size() >= 2)
        row.defect_slope = defect_slope(series, 0.0, cfg.T).slope;
      for (const Event& e : series.events)
        if (!row.has_cusp) {
          row.has_cusp = true;
          row.cusp_t = e.t;
        }
    } catch (const Error& e) {
      std::string msg = e.what();
      std::replace(msg.begin(), msg.end(), ',', ';');
      row.status = msg;
    }
    rows[std::size_t(i)] = std::move(row);
  }

  std::string csv = "n,rho,defect_slope,timerev_sup,cusp_t,status\n";
  bool any_failed = false;
  for (const SweepRow& r : rows) {
    csv += std::to_string(r.n);
    csv += ',';
    csv += io::fmt17(r.rho);
    csv += ',';
    csv += io::fmt17(r.defect_slope);
    csv += ',';
    csv += io::fmt17(r.timerev_sup);
    csv += ',';
    if (r.has_cusp) csv += io::fmt17(r.cusp_t);
    csv += ',';
    csv += r.status;
    csv += '\n';
    if (r.status != "ok") any_failed = true;
  }
  std::filesystem::create_directories(cfg.out_dir);
  const std::string path = cfg.out_dir + "/sweep.csv";
  io::write_file(path, csv);
  std::printf("%s\n", path.c_str());
  return any_failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lemlab: Laplacian-growth laboratory for polynomial lemniscates"};
  app.require_subcommand(1);

  std::string config_path, out_dir, curve_path, out_path, poly_spec, suite;
  int jobs = 0, degree = 0, restarts = 8, samples = 256;
  std::uint64_t seed = lemlab::kDefaultFitSeed;

  auto* evolve = app.add_subcommand("evolve", "Evolve a domain under Laplacian growth");
  evolve->add_option("--config", config_path, "scenario file")->required();
  evolve->add_option("--jobs", jobs, "worker threads (reserved)");
  evolve->add_option("--out", out_dir, "output directory override");

  auto* fitc = app.add_subcommand("fit", "Fit a degree-n lemniscate to a curve CSV");
  fitc->add_option("--curve", curve_path, "curve CSV (theta,re_z,im_z)")->required();
  fitc->add_option("--degree", degree, "lemniscate degree n")->required();
  fitc->add_option("--restarts", restarts, "multistart restarts");
  fitc->add_option("--seed", seed, "multistart seed");
  fitc->add_option("--out", out_path, "write report JSON here instead of stdout");

  auto* trace = app.add_subcommand("trace", "Trace the unit level set of a polynomial");
  trace->add_option("--poly", poly_spec, "polynomial `scale:(re,im)[^k]...`")->required();
  trace->add_option("--samples", samples, "number of samples (power of two)");
  trace->add_option("--out", out_path, "output curve CSV (stdout if omitted)");

  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  verify->add_option("suite", suite, "circle|lemma|timerev|destruction|all")->required();

  auto* sweep = app.add_subcommand("sweep", "Destruction sweep over a parameter grid");
  sweep->add_option("--config", config_path, "scenario file with sweep axes")->required();
  sweep->add_option("--jobs", jobs, "parallel grid workers (default: logical cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (evolve->parsed()) return run_evolve(config_path, out_dir);
    if (fitc->parsed()) return run_fit(curve_path, degree, restarts, seed, out_path);
    if (trace->parsed()) return run_trace(poly_spec, samples, out_path);
    if (verify->parsed()) return run_verify(suite);
    if (sweep->parsed()) return run_sweep(config_path, jobs);
  } catch (const lemlab::UsageError& e) {
    std::fprintf(stderr, "lemlab: %s\n", e.what());
    return 2;
  } catch (const lemlab::Error& e) {
    std::fprintf(stderr, "lemlab: %s\n", e.what());
    return 1;
  }
  return 2;
}
