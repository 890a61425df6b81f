#pragma once

// The NSGA-II main loop and the archive of exactly evaluated trade-offs.

#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "renosched/metrics.hpp"
#include "renosched/nsga2.hpp"
#include "renosched/plbe.hpp"
#include "renosched/upper.hpp"

namespace renosched {

// Non-dominated set of exact individuals seen so far. Points with equal
// objectives are stored once, under the lexicographically smallest schedule.
class ParetoArchive {
 public:
  struct Entry {
    Schedule schedule;
    Objectives objectives;
  };

  // Returns true if the archive changed.
  bool insert(const Schedule& s, const Objectives& o) {
    for (auto& e : entries_) {
      if (dominates(e.objectives, o)) return false;
      if (e.objectives == o) {
        if (s < e.schedule) {
          e.schedule = s;
          return true;
        }
        return false;
      }
    }
    std::erase_if(entries_, [&](const Entry& e) { return dominates(o, e.objectives); });
    entries_.push_back({s, o});
    return true;
  }

  // Sorted by ttd, then risk.
  std::vector<Entry> sorted() const {
    std::vector<Entry> out = entries_;
    std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) {
      if (a.objectives.ttd != b.objectives.ttd) return a.objectives.ttd < b.objectives.ttd;
      return a.objectives.risk < b.objectives.risk;
    });
    return out;
  }

  std::vector<Point2> points() const {
    std::vector<Point2> out;
    for (const Entry& e : sorted()) out.push_back(e.objectives.point());
    return out;
  }

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

 private:
  std::vector<Entry> entries_;
};

struct EvolveConfig {
  std::size_t population = 100;
  // Stopping rules, checked at generation boundaries; negative disables.
  long max_generations = -1;
  double max_seconds = -1.0;
  long max_exact_evals = -1;
  long max_sims = -1;
  double crossover_rate = kDefaultCrossoverRate;
  double mutation_rate = -1.0;  // negative: 1/|P|
  std::uint64_t seed = 1;
  NormalizationBounds bounds;
};

struct GenerationSnapshot {
  int generation = 0;
  FrontMetrics metrics;
  long unique_sims = 0;
  long exact_evals = 0;
  long pruned_evals = 0;
  double wall_seconds = 0.0;
};

struct RunResult {
  std::vector<GenerationSnapshot> history;
  ParetoArchive archive;
  std::vector<Individual> population;
  std::optional<std::string> error;  // set when the run aborted
  bool infeasible = false;           // the abort was an InfeasibleError
  int generations = 0;               // completed generations after the initial one
};

struct EvolveHooks {
  std::function<void(const Individual&)> on_evaluated;
  std::function<void(const GenerationSnapshot&)> on_generation;
};

// Uniform genotype in each project's window, then repaired.
inline Schedule random_schedule(const Instance& inst, Rng& rng) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    Schedule s;
    s.start.resize(inst.projects.size());
    for (std::size_t p = 0; p < s.start.size(); ++p)
      s.start[p] = std::uniform_int_distribution<int>(0, std::max(inst.latest_start(p), 0))(rng);
    try {
      return repair(inst, std::move(s), rng);
    } catch (const InfeasibleError&) {
    }
  }
  throw InfeasibleError("could not draw a feasible initial schedule");
}

inline RunResult evolve_run(const Instance& inst, Evaluator& evaluator, const EvolveConfig& cfg,
                            const EvolveHooks& hooks = {}) {
  if (cfg.population < 2 || cfg.population % 2 != 0) throw Error("population size must be even and >= 2");
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  const double mrate = cfg.mutation_rate < 0.0 ? default_mutation_rate(inst) : cfg.mutation_rate;

  Rng rng(cfg.seed);
  RunResult res;

  auto absorb = [&](const EvalOutcome& o) {
    if (hooks.on_evaluated) hooks.on_evaluated(o.individual);
    if (o.individual.status == EvalStatus::Exact) res.archive.insert(o.individual.schedule, *o.individual.objectives);
  };
  auto snapshot = [&](int g) {
    GenerationSnapshot s;
    s.generation = g;
    const auto pts = res.archive.points();
    s.metrics = front_metrics(pts, cfg.bounds);
    s.unique_sims = evaluator.total_sims();
    s.exact_evals = evaluator.exact_evaluations();
    s.pruned_evals = evaluator.pruned_evaluations();
    s.wall_seconds = elapsed();
    res.history.push_back(s);
    if (hooks.on_generation) hooks.on_generation(s);
  };

  try {
    std::vector<Schedule> init;
    init.reserve(cfg.population);
    for (std::size_t i = 0; i < cfg.population; ++i) init.push_back(random_schedule(inst, rng));
    evaluator.set_generation(0);
    for (EvalOutcome& o : evaluator.evaluate_exact(init)) {
      absorb(o);
      res.population.push_back(std::move(o.individual));
    }
    evaluator.end_generation();
    rank_population(res.population);
    snapshot(0);

    for (int g = 1;; ++g) {
      if (cfg.max_generations >= 0 && res.generations >= cfg.max_generations) break;
      if (cfg.max_seconds >= 0.0 && elapsed() >= cfg.max_seconds) break;
      if (cfg.max_exact_evals >= 0 && evaluator.exact_evaluations() >= cfg.max_exact_evals) break;
      if (cfg.max_sims >= 0 && evaluator.total_sims() >= cfg.max_sims) break;

      std::vector<Schedule> offspring;
      offspring.reserve(cfg.population);
      while (offspring.size() < cfg.population) {
        const Schedule& a = res.population[tournament_select(res.population, rng)].schedule;
        const Schedule& b = res.population[tournament_select(res.population, rng)].schedule;
        auto [c1, c2] = crossover(inst, a, b, rng, cfg.crossover_rate);
        offspring.push_back(mutate(inst, c1, rng, mrate));
        if (offspring.size() < cfg.population) offspring.push_back(mutate(inst, c2, rng, mrate));
      }

      evaluator.set_generation(g);
      std::vector<EvalOutcome> outcomes = evaluator.evaluate(res.population, offspring);
      std::vector<Individual> pool = res.population;
      for (EvalOutcome& o : outcomes) {
        absorb(o);
        const bool keep = o.individual.status == EvalStatus::Exact ||
                          evaluator.config().variant == PlbeVariant::EliminationPruning;
        if (keep) pool.push_back(std::move(o.individual));
      }
      evaluator.end_generation();
      res.population = truncate_population(std::move(pool), cfg.population);
      res.generations = g;
      snapshot(g);
    }
  } catch (const InfeasibleError& e) {
    res.error = e.what();
    res.infeasible = true;
  } catch (const std::exception& e) {
    res.error = e.what();
  }
  return res;
}

// Shared normalization: risk over [0, sum of w_p]; travel delay over
// [0, largest exact delay among two reference schedules], the repaired
// all-latest and all-earliest starts. Uses a private cache.
inline NormalizationBounds reference_bounds(const Instance& inst, const SimulateFn& simulate) {
  NormalizationBounds b;
  b.risk_hi = inst.total_failure_cost() > 0.0 ? inst.total_failure_cost() : 1.0;
  const std::size_t n = inst.num_projects();
  ScenarioCache cache(n);
  cache.insert(Scenario(n), simulate(Scenario(n)));
  std::vector<Schedule> refs;
  Schedule latest{std::vector<int>(n, 0)};
  for (std::size_t p = 0; p < n; ++p) latest.start[p] = std::max(inst.latest_start(p), 0);
  for (Schedule s : {latest, Schedule{std::vector<int>(n, 0)}}) {
    Rng rng(0);
    try {
      refs.push_back(repair(inst, std::move(s), rng));
    } catch (const InfeasibleError&) {
    }
  }
  double hi = 0.0;
  for (const Schedule& s : refs) {
    for (const auto& [sc, _] : scenarios_of(inst, s))
      if (!cache.contains(sc)) cache.insert(sc, simulate(sc));
    hi = std::max(hi, ttd(inst, s, cache));
  }
  b.ttd_hi = hi > 0.0 ? hi : 1.0;
  return b;
}

}  // namespace renosched
