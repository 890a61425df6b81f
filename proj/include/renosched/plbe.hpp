#pragma once

// Offspring evaluation. The standard evaluator simulates every uncached
// scenario. Progressive lower-bound evaluation (PLBE) interleaves surrogate
// lower bounds with one-at-a-time simulation of the most frequent remaining
// scenario, and stops as soon as the bound is dominated.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <thread>
#include <unordered_map>
#include <vector>

#include "renosched/nsga2.hpp"
#include "renosched/scenario.hpp"
#include "renosched/surrogate.hpp"
#include "renosched/upper.hpp"

namespace renosched {

enum class EvaluatorKind { Standard, Plbe };
enum class PlbeVariant { EliminationPruning, LazyEvaluation };

struct EvalOutcome {
  Individual individual;
  long sims_spent = 0;
};

struct TraceRow {
  int generation = 0;
  std::uint64_t genotype_hash = 0;
  long sims_spent = 0;
  EvalStatus status = EvalStatus::Unevaluated;
  double ttd_or_estimate = 0.0;
  double risk = 0.0;
};

// Travel-delay bound: cached stt where known, surrogate estimate otherwise.
inline double estimate_ttd_lb(const Instance& inst, const std::vector<std::pair<Scenario, int>>& scenarios,
                              const ScenarioCache& cache, const Surrogate& surrogate) {
  const double base = cache.base_stt();
  double total = 0.0;
  for (const auto& [sc, mult] : scenarios) {
    const auto v = cache.find(sc);
    total += mult * ((v ? *v : surrogate.estimate(sc, cache)) - base);
  }
  return inst.extrapolation * total;
}

inline double estimate_ttd_lb(const Instance& inst, const Schedule& s, const ScenarioCache& cache,
                              const Surrogate& surrogate) {
  return estimate_ttd_lb(inst, scenarios_of(inst, s), cache, surrogate);
}

// Strict dominance by any member of `others`; equal points do not prune.
inline bool is_dominated(const Objectives& candidate, std::span<const Objectives> others) {
  return std::any_of(others.begin(), others.end(), [&](const Objectives& o) { return dominates(o, candidate); });
}

// Most frequent first; then fewest active projects; then smallest bitstring.
inline std::size_t select_next_scenario(std::span<const std::pair<Scenario, int>> remaining) {
  if (remaining.empty()) throw Error("select_next_scenario: nothing remaining");
  std::size_t best = 0;
  for (std::size_t i = 1; i < remaining.size(); ++i) {
    const auto& [s, m] = remaining[i];
    const auto& [bs, bm] = remaining[best];
    if (m != bm) {
      if (m > bm) best = i;
      continue;
    }
    const auto c = s.count(), bc = bs.count();
    if (c != bc) {
      if (c < bc) best = i;
      continue;
    }
    if (s.bitstring() < bs.bitstring()) best = i;
  }
  return best;
}

struct EvaluatorConfig {
  EvaluatorKind kind = EvaluatorKind::Standard;
  PlbeVariant variant = PlbeVariant::EliminationPruning;
  int workers = 1;  // concurrent simulations in the standard batch
};

class Evaluator {
 public:
  // `surrogate` may be null for the standard evaluator.
  Evaluator(const Instance& inst, ScenarioCache& cache, SimulateFn simulate, EvaluatorConfig cfg,
            std::unique_ptr<Surrogate> surrogate = nullptr)
      : inst_(&inst), cache_(&cache), simulate_(std::move(simulate)), cfg_(cfg), surrogate_(std::move(surrogate)) {
    if (cfg_.kind == EvaluatorKind::Plbe && !surrogate_) throw Error("PLBE evaluator needs a surrogate");
    if (!cache_->has_base()) {
      cache_->insert(Scenario(inst.num_projects()), simulate_(Scenario(inst.num_projects())));
      ++total_sims_;
    }
  }

  const EvaluatorConfig& config() const noexcept { return cfg_; }
  const ScenarioCache& cache() const noexcept { return *cache_; }
  const Surrogate* surrogate() const noexcept { return surrogate_.get(); }
  long total_sims() const noexcept { return total_sims_; }
  long exact_evaluations() const noexcept { return exact_evals_; }
  long pruned_evaluations() const noexcept { return pruned_evals_; }
  std::size_t marked_count() const noexcept { return marked_.size(); }

  void set_trace(std::function<void(const TraceRow&)> f) { trace_ = std::move(f); }
  void set_generation(int g) noexcept { generation_ = g; }

  // Fully simulates every schedule regardless of kind.
  std::vector<EvalOutcome> evaluate_exact(std::span<const Schedule> schedules) {
    std::vector<EvalOutcome> out(schedules.size());
    std::vector<long> spent = simulate_batch(schedules);
    for (std::size_t i = 0; i < schedules.size(); ++i) {
      out[i].individual = exact_individual(schedules[i]);
      out[i].sims_spent = spent[i];
      record(out[i]);
    }
    return out;
  }

  // Outcomes come back in offspring order. PLBE processes offspring in
  // genotype order; the dominance reference is the exact members of
  // `parents` plus offspring already evaluated exactly this call.
  std::vector<EvalOutcome> evaluate(std::span<const Individual> parents, std::span<const Schedule> offspring) {
    if (cfg_.kind == EvaluatorKind::Standard) return evaluate_exact(offspring);

    std::vector<Objectives> reference;
    for (const Individual& p : parents)
      if (p.status == EvalStatus::Exact && p.objectives) reference.push_back(*p.objectives);

    std::vector<std::size_t> order(offspring.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return offspring[a] < offspring[b]; });

    std::vector<EvalOutcome> out(offspring.size());
    for (std::size_t i : order) {
      out[i] = evaluate_one(offspring[i], reference);
      if (out[i].individual.status == EvalStatus::Exact) reference.push_back(*out[i].individual.objectives);
      record(out[i]);
    }
    return out;
  }

  // Generation boundary: lets the surrogate refit.
  void end_generation() {
    if (surrogate_) surrogate_->update(*cache_);
  }

 private:
  EvalOutcome evaluate_one(const Schedule& x, std::span<const Objectives> reference) {
    EvalOutcome res;
    res.individual.schedule = x;
    if (cfg_.variant == PlbeVariant::EliminationPruning) {
      if (auto it = marked_.find(x); it != marked_.end()) {
        res.individual.objectives = it->second;
        res.individual.status = EvalStatus::Pruned;
        return res;
      }
    }
    const double r = risk(*inst_, x);
    const auto scenarios = scenarios_of(*inst_, x);
    std::vector<std::pair<Scenario, int>> remaining;
    for (;;) {
      remaining.clear();
      for (const auto& e : scenarios)
        if (!cache_->contains(e.first)) remaining.push_back(e);
      const double est = estimate_ttd_lb(*inst_, scenarios, *cache_, *surrogate_);
      if (remaining.empty()) {
        res.individual.objectives = Objectives{est, r};
        res.individual.status = EvalStatus::Exact;
        return res;
      }
      const Objectives bound{est, r};
      if (is_dominated(bound, reference)) {
        res.individual.objectives = bound;
        res.individual.status = EvalStatus::Pruned;
        if (cfg_.variant == PlbeVariant::EliminationPruning) marked_.emplace(x, bound);
        return res;
      }
      const Scenario& next = remaining[select_next_scenario(remaining)].first;
      if (cache_->insert(next, simulate_(next))) {
        ++res.sims_spent;
        ++total_sims_;
      }
    }
  }

  Individual exact_individual(const Schedule& s) const {
    Individual ind;
    ind.schedule = s;
    ind.objectives = Objectives{ttd(*inst_, s, *cache_), risk(*inst_, s)};
    ind.status = EvalStatus::Exact;
    return ind;
  }

  // Simulates all uncached scenarios of `schedules`, deduplicated and in
  // first-need order; each new simulation is charged to the first schedule
  // that needed it.
  std::vector<long> simulate_batch(std::span<const Schedule> schedules) {
    std::vector<long> spent(schedules.size(), 0);
    std::vector<Scenario> todo;
    std::unordered_map<Scenario, std::size_t, ScenarioHash> owner;
    for (std::size_t i = 0; i < schedules.size(); ++i)
      for (auto& [sc, _] : scenarios_of(*inst_, schedules[i]))
        if (!cache_->contains(sc) && owner.emplace(sc, i).second) todo.push_back(sc);

    std::vector<double> values(todo.size());
    const int workers = std::max(1, std::min<int>(cfg_.workers, static_cast<int>(todo.size())));
    if (workers <= 1) {
      for (std::size_t k = 0; k < todo.size(); ++k) values[k] = simulate_(todo[k]);
    } else {
      std::atomic<std::size_t> next{0};
      std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
      {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) {
          pool.emplace_back([&, w] {
            try {
              for (std::size_t k; (k = next.fetch_add(1)) < todo.size();) values[k] = simulate_(todo[k]);
            } catch (...) {
              errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
          });
        }
      }
      for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    }
    for (std::size_t k = 0; k < todo.size(); ++k) {
      if (cache_->insert(todo[k], values[k])) {
        ++spent[owner.at(todo[k])];
        ++total_sims_;
      }
    }
    return spent;
  }

  void record(const EvalOutcome& o) {
    if (o.individual.status == EvalStatus::Exact) ++exact_evals_;
    else ++pruned_evals_;
    if (trace_) {
      trace_({generation_, o.individual.schedule.hash(), o.sims_spent, o.individual.status,
              o.individual.objectives->ttd, o.individual.objectives->risk});
    }
  }

  const Instance* inst_;
  ScenarioCache* cache_;
  SimulateFn simulate_;
  EvaluatorConfig cfg_;
  std::unique_ptr<Surrogate> surrogate_;
  std::map<Schedule, Objectives> marked_;
  std::function<void(const TraceRow&)> trace_;
  int generation_ = 0;
  long total_sims_ = 0;
  long exact_evals_ = 0;
  long pruned_evals_ = 0;
};

}  // namespace renosched
