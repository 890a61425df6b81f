// renosched command-line front end.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "renosched/archive.hpp"
#include "renosched/evolve.hpp"
#include "renosched/instance_io.hpp"
#include "renosched/instgen.hpp"
#include "renosched/plbe.hpp"
#include "renosched/simulator.hpp"
#include "renosched/surrogate.hpp"
#include "renosched/tap.hpp"

namespace fs = std::filesystem;
using namespace renosched;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kInfeasible = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("renosched");
  logger->set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* lvl = std::getenv("RENOSCHED_LOG")) spdlog::set_level(spdlog::level::from_str(lvl));
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
}

std::string read_text(const fs::path& p) { return detail::read_file(p); }

// ---------------------------------------------------------------------------

struct TapArgs {
  std::string net, trips, scenario, instance, out;
  double tol = 1e-4;
  int max_iters = 4000;
  double demand_scale = 1.0;
  double capacity_scale = 1.0;
};

int run_tap(const TapArgs& a) {
  Graph g;
  DemandMatrix dm;
  std::vector<ScenarioEdit> edits;
  if (!a.instance.empty()) {
    const Instance inst = read_instance_file(a.instance);
    g = inst.graph;
    dm = inst.demand;
    if (!a.scenario.empty()) {
      const Scenario sc = Scenario::from_bitstring(a.scenario);
      if (sc.size() != inst.num_projects()) throw UsageError("--scenario needs one bit per project");
      edits = scenario_edits(inst, sc);
    }
  } else {
    if (a.net.empty() || a.trips.empty()) throw UsageError("tap needs --net and --trips, or --instance");
    g = parse_tntp_net(read_text(a.net));
    dm = parse_tntp_trips(read_text(a.trips), g.num_nodes());
    if (a.scenario.size() > 0) {
      const Scenario sc = Scenario::from_bitstring(a.scenario);
      if (sc.size() != g.num_links()) throw UsageError("--scenario needs one bit per link");
      for (std::size_t p : sc.projects()) edits.push_back(closure_edit(g.link(static_cast<int>(p))));
    }
  }
  if (a.capacity_scale != 1.0) g = scale_capacity(g, a.capacity_scale);
  if (a.demand_scale != 1.0) dm = scale_demand(dm, a.demand_scale);
  if (a.capacity_scale != 1.0)
    for (ScenarioEdit& e : edits) e.capacity *= a.capacity_scale;

  TapOptions opt;
  opt.tol = a.tol;
  opt.max_iters = a.max_iters;
  const TapResult r = solve_ue(apply_scenario(g, edits), dm, opt);
  spdlog::info("gap {:.3e} after {} iterations, stt {:.6g}{}", r.relative_gap, r.iterations, r.system_travel_time,
               r.converged ? "" : " (not converged)");
  if (a.out.empty()) {
    write_tap_csv(std::cout, r);
    write_tap_sidecar(std::cerr, r);
  } else {
    std::ostringstream csv, side;
    write_tap_csv(csv, r);
    write_tap_sidecar(side, r);
    fs::path out(a.out);
    write_text(out, csv.str());
    write_text(fs::path(out).replace_extension(".json"), side.str());
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  std::string net, trips, variant = "base", out = "instance.json", topology_dir;
  std::uint64_t seed = 1;
  int projects = 0;
  int horizon = 80;
};

int run_generate(const GenerateArgs& a) {
  GenConfig cfg;
  cfg.seed = a.seed;
  cfg.horizon = a.horizon;
  cfg.project_count = a.projects;
  cfg = variant(cfg, a.variant);
  NetworkSource src;
  src.net_path = fs::absolute(a.net).lexically_normal().string();
  src.trips_path = fs::absolute(a.trips).lexically_normal().string();
  if (cfg.topology != "base") {
    const fs::path dir = a.topology_dir.empty() ? fs::path(src.net_path).parent_path() / "topology" : fs::path(a.topology_dir);
    src.topology_file = fs::absolute(dir / (cfg.topology + ".txt")).lexically_normal().string();
  }
  const Instance inst = generate_from_source(src, cfg);
  Json prov{{"generator", "renosched generate"}, {"config", gen_config_json(cfg)}};
  write_text(a.out, instance_to_json(inst, prov).dump(2) + "\n");
  spdlog::info("{} projects, horizon {}, m {}, work sum {} -> {}", inst.num_projects(), inst.horizon,
               inst.max_simultaneous, inst.work_sum(), a.out);
  return kOk;
}

// ---------------------------------------------------------------------------

struct OptimizeArgs {
  std::string instance, evaluator = "standard", variant = "ep", surrogate = "heuristic", out = "run", bounds, cache;
  std::vector<std::string> budget;
  std::uint64_t seed = 1;
  int workers = 1;
  std::size_t population = 100;
  double tol = 1e-4;
  bool trace = false;
};

std::unique_ptr<Surrogate> make_surrogate(const std::string& name) {
  if (name == "heuristic") return std::make_unique<HeuristicSurrogate>();
  if (name.size() == 3 && name[0] == 'q') {
    const int pct = std::stoi(name.substr(1));
    if (pct == 5 || pct == 10 || pct == 20 || pct == 50) return std::make_unique<QuantileSurrogate>(pct / 100.0);
  }
  throw UsageError("unknown surrogate '" + name + "'");
}

void apply_budget(EvolveConfig& cfg, const std::vector<std::string>& specs) {
  for (const std::string& spec : specs) {
    for (const std::string& item : detail::split(spec, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw UsageError("budget must look like iters=N or seconds=S");
      const std::string key = item.substr(0, eq), val = item.substr(eq + 1);
      try {
        if (key == "iters") cfg.max_generations = std::stol(val);
        else if (key == "seconds") cfg.max_seconds = std::stod(val);
        else if (key == "evals") cfg.max_exact_evals = std::stol(val);
        else if (key == "sims") cfg.max_sims = std::stol(val);
        else throw UsageError("unknown budget '" + key + "'");
      } catch (const std::logic_error&) {
        throw UsageError("bad budget value '" + item + "'");
      }
    }
  }
  if (cfg.max_generations < 0 && cfg.max_seconds < 0 && cfg.max_exact_evals < 0 && cfg.max_sims < 0)
    cfg.max_generations = 100;
}

int run_optimize(const OptimizeArgs& a) {
  EvolveConfig cfg;
  cfg.seed = a.seed;
  cfg.population = a.population;
  apply_budget(cfg, a.budget);
  if (a.evaluator != "standard" && a.evaluator != "plbe") throw UsageError("--evaluator is standard or plbe");
  if (a.variant != "ep" && a.variant != "le") throw UsageError("--variant is ep or le");
  if (a.workers < 1) throw UsageError("--workers must be >= 1");
  EvaluatorConfig ecfg;
  ecfg.kind = a.evaluator == "plbe" ? EvaluatorKind::Plbe : EvaluatorKind::Standard;
  ecfg.variant = a.variant == "le" ? PlbeVariant::LazyEvaluation : PlbeVariant::EliminationPruning;
  ecfg.workers = a.workers;
  std::unique_ptr<Surrogate> surrogate = make_surrogate(a.surrogate);
  const std::string surrogate_name = surrogate->name();

  const Instance inst = read_instance_file(a.instance);
  TapOptions topt;
  topt.tol = a.tol;
  const TrafficSimulator sim(inst, topt);

  if (!a.bounds.empty()) {
    std::ifstream in(a.bounds);
    if (!in) throw Error("cannot open " + a.bounds);
    cfg.bounds = get_bounds(read_config(in));
  } else {
    cfg.bounds = reference_bounds(inst, sim.as_function());
  }
  spdlog::info("bounds ttd [{:.6g}, {:.6g}] risk [{:.6g}, {:.6g}]", cfg.bounds.ttd_lo, cfg.bounds.ttd_hi,
               cfg.bounds.risk_lo, cfg.bounds.risk_hi);

  ScenarioCache cache(inst.num_projects());
  if (!a.cache.empty()) {
    std::ifstream in(a.cache);
    if (!in) throw Error("cannot open " + a.cache);
    cache = ScenarioCache::load_csv(in, inst.num_projects());
    spdlog::info("warm start with {} cached scenarios", cache.size());
  }

  const fs::path out(a.out);
  fs::create_directories(out / "plots");
  Evaluator evaluator(inst, cache, sim.as_function(), ecfg,
                      ecfg.kind == EvaluatorKind::Plbe ? std::move(surrogate) : nullptr);

  std::ofstream trace;
  if (a.trace) {
    trace.open(out / "trace.csv", std::ios::binary);
    trace << kTraceHeader << '\n';
    evaluator.set_trace([&](const TraceRow& r) { write_trace_row(trace, r); });
  }
  std::ofstream history(out / "history.csv", std::ios::binary);
  history << kHistoryHeader << '\n';
  EvolveHooks hooks;
  hooks.on_generation = [&](const GenerationSnapshot& s) {
    write_history_row(history, s);
    history.flush();
    spdlog::info("gen {:4d}  hv {:.4f}  pf {:3d}  sims {:5d}  exact {:6d}  pruned {:6d}  {:.1f}s", s.generation,
                 s.metrics.hypervolume, s.metrics.pf_size, s.unique_sims, s.exact_evals, s.pruned_evals,
                 s.wall_seconds);
  };

  const RunResult res = evolve_run(inst, evaluator, cfg, hooks);

  Instance archived = inst;
  archived.source.net_path = fs::absolute(detail::resolve_path(inst.source.net_path, fs::path(a.instance).parent_path())).string();
  archived.source.trips_path = fs::absolute(detail::resolve_path(inst.source.trips_path, fs::path(a.instance).parent_path())).string();
  if (!inst.source.topology_file.empty())
    archived.source.topology_file =
        fs::absolute(detail::resolve_path(inst.source.topology_file, fs::path(a.instance).parent_path())).string();
  write_text(out / "instance.json", instance_to_json(archived).dump(2) + "\n");

  KeyValues kv;
  kv["instance"] = quoted(a.instance);
  kv["evaluator"] = quoted(a.evaluator);
  kv["variant"] = quoted(a.variant);
  kv["surrogate"] = quoted(ecfg.kind == EvaluatorKind::Plbe ? surrogate_name : "none");
  kv["seed"] = std::to_string(a.seed);
  kv["workers"] = std::to_string(a.workers);
  kv["population"] = std::to_string(cfg.population);
  kv["crossover_rate"] = detail::format_double(cfg.crossover_rate);
  kv["mutation_rate"] = detail::format_double(default_mutation_rate(inst));
  kv["tap_tol"] = detail::format_double(a.tol);
  kv["budget.iters"] = std::to_string(cfg.max_generations);
  kv["budget.seconds"] = detail::format_double(cfg.max_seconds);
  kv["budget.evals"] = std::to_string(cfg.max_exact_evals);
  kv["budget.sims"] = std::to_string(cfg.max_sims);
  kv["result.generations"] = std::to_string(res.generations);
  kv["result.unique_sims"] = std::to_string(evaluator.total_sims());
  kv["result.exact_evals"] = std::to_string(evaluator.exact_evaluations());
  kv["result.pruned_evals"] = std::to_string(evaluator.pruned_evaluations());
  put_bounds(kv, cfg.bounds);
  {
    std::ostringstream s;
    write_config(s, kv);
    write_text(out / "config.toml", s.str());
  }
  {
    std::ostringstream s;
    write_front(s, res.archive);
    write_text(out / "front.csv", s.str());
  }
  cache.save_csv((out / "cache.csv").string());
  history.close();
  {
    std::ifstream in(out / "history.csv");
    for (const auto& [name, svg] : history_charts(read_history(in))) write_text(out / "plots" / name, svg);
  }

  if (res.error) {
    spdlog::error("run aborted: {}", *res.error);
    return res.infeasible ? kInfeasible : kData;
  }
  spdlog::info("{} generations, front of {} -> {}", res.generations, res.archive.size(), out.string());
  return kOk;
}

// ---------------------------------------------------------------------------

int run_metrics(const std::string& archive) {
  const fs::path dir(archive);
  std::ifstream cin_cfg(dir / "config.toml");
  if (!cin_cfg) throw Error("cannot open " + (dir / "config.toml").string());
  const NormalizationBounds b = get_bounds(read_config(cin_cfg));
  std::ifstream fin(dir / "front.csv");
  if (!fin) throw Error("cannot open " + (dir / "front.csv").string());
  const std::vector<Point2> pts = read_front(fin);
  const FrontMetrics m = front_metrics(pts, b);
  const NormalizedFront nf = normalize(pts, b);
  const auto clamped = std::count(nf.clamped.begin(), nf.clamped.end(), true);

  std::cout << "metric,value\n"
            << "hypervolume," << detail::format_double(m.hypervolume) << '\n'
            << "max_spread," << detail::format_double(m.max_spread) << '\n'
            << "min_dist," << detail::format_double(m.min_dist) << '\n'
            << "pf_size," << m.pf_size << '\n'
            << "clamped_points," << clamped << '\n';

  std::ifstream hin(dir / "history.csv");
  if (hin) {
    const auto rows = read_history(hin);
    if (!rows.empty()) {
      const HistoryRow& last = rows.back();
      const bool same = last.hypervolume == m.hypervolume && last.min_dist == m.min_dist && last.pf_size == m.pf_size;
      std::cout << "matches_history," << (same ? "yes" : "no") << '\n';
      if (!same) spdlog::warn("recomputed metrics differ from the last history row");
    }
  }
  return kOk;
}

int run_plot(const std::string& archive) {
  const fs::path dir(archive);
  std::ifstream in(dir / "history.csv");
  if (!in) throw Error("cannot open " + (dir / "history.csv").string());
  fs::create_directories(dir / "plots");
  for (const auto& [name, svg] : history_charts(read_history(in))) {
    write_text(dir / "plots" / name, svg);
    std::cout << (dir / "plots" / name).string() << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Road renovation scheduling under uncertain lifespans"};
  app.require_subcommand(1);

  TapArgs tap;
  auto* tap_cmd = app.add_subcommand("tap", "Solve user equilibrium for one network scenario");
  tap_cmd->add_option("--net", tap.net, "TNTP network file");
  tap_cmd->add_option("--trips", tap.trips, "TNTP trips file");
  tap_cmd->add_option("--instance", tap.instance, "Instance JSON (scenario bits then index projects)");
  tap_cmd->add_option("--scenario", tap.scenario, "Bitstring of closed links (or active projects)");
  tap_cmd->add_option("--tol", tap.tol, "Relative gap tolerance")->check(CLI::PositiveNumber);
  tap_cmd->add_option("--max-iters", tap.max_iters, "Frank-Wolfe iteration cap")->check(CLI::PositiveNumber);
  tap_cmd->add_option("--demand-scale", tap.demand_scale, "Demand multiplier")->check(CLI::PositiveNumber);
  tap_cmd->add_option("--capacity-scale", tap.capacity_scale, "Capacity multiplier")->check(CLI::PositiveNumber);
  tap_cmd->add_option("--out", tap.out, "CSV output path (sidecar JSON beside it); stdout if omitted");

  GenerateArgs gen;
  auto* gen_cmd = app.add_subcommand("generate", "Generate a problem instance");
  gen_cmd->add_option("--net", gen.net, "TNTP network file")->required();
  gen_cmd->add_option("--trips", gen.trips, "TNTP trips file")->required();
  gen_cmd->add_option("--seed", gen.seed, "Random seed");
  gen_cmd->add_option("--variant", gen.variant, "Preset variant")->check(CLI::IsMember(variant_names()));
  gen_cmd->add_option("--projects", gen.projects, "Number of projects (0: one per link)")->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--horizon", gen.horizon, "Planning periods")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--topology-dir", gen.topology_dir, "Directory holding topology edit files");
  gen_cmd->add_option("--out", gen.out, "Instance JSON output path");

  OptimizeArgs opt;
  auto* opt_cmd = app.add_subcommand("optimize", "Run NSGA-II and write a run archive");
  opt_cmd->add_option("--instance", opt.instance, "Instance JSON")->required();
  opt_cmd->add_option("--evaluator", opt.evaluator, "standard or plbe")->check(CLI::IsMember({"standard", "plbe"}));
  opt_cmd->add_option("--variant", opt.variant, "ep or le")->check(CLI::IsMember({"ep", "le"}));
  opt_cmd->add_option("--surrogate", opt.surrogate, "heuristic, q05, q10, q20 or q50")
      ->check(CLI::IsMember({"heuristic", "q05", "q10", "q20", "q50"}));
  opt_cmd->add_option("--seed", opt.seed, "Random seed");
  opt_cmd->add_option("--budget", opt.budget, "iters=N, seconds=S, evals=N or sims=N (comma-separated or repeated)");
  opt_cmd->add_option("--workers", opt.workers, "Concurrent simulations")->check(CLI::PositiveNumber);
  opt_cmd->add_option("--population", opt.population, "Population size (even)")->check(CLI::PositiveNumber);
  opt_cmd->add_option("--tol", opt.tol, "Frank-Wolfe relative gap tolerance")->check(CLI::PositiveNumber);
  opt_cmd->add_option("--bounds", opt.bounds, "Reuse normalization bounds from a config.toml");
  opt_cmd->add_option("--cache", opt.cache, "Warm-start scenario cache CSV");
  opt_cmd->add_flag("--trace", opt.trace, "Write per-evaluation trace.csv");
  opt_cmd->add_option("--out", opt.out, "Archive directory");

  std::string metrics_dir, plot_dir;
  auto* met_cmd = app.add_subcommand("metrics", "Recompute front metrics of an archive");
  met_cmd->add_option("--archive", metrics_dir, "Archive directory")->required();
  auto* plot_cmd = app.add_subcommand("plot", "Write SVG charts of an archive's history");
  plot_cmd->add_option("--archive", plot_dir, "Archive directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*tap_cmd) return run_tap(tap);
    if (*gen_cmd) return run_generate(gen);
    if (*opt_cmd) return run_optimize(opt);
    if (*met_cmd) return run_metrics(metrics_dir);
    if (*plot_cmd) return run_plot(plot_dir);
  } catch (const UsageError& e) {
    spdlog::error("{}", e.what());
    return kUsage;
  } catch (const InfeasibleError& e) {
    spdlog::error("infeasible: {}", e.what());
    return kInfeasible;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kData;
  }
  return kUsage;
}
