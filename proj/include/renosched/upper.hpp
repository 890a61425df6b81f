#pragma once

// Upper-level scheduling model: projects, failure risk, schedule constraints,
// repair, and scenario extraction for the travel-delay objective.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "renosched/error.hpp"
#include "renosched/network.hpp"
#include "renosched/scenario.hpp"

namespace renosched {

using Rng = std::mt19937_64;

struct Project {
  int id = 0;
  int duration = 1;           // d_p, periods
  double cost = 0.0;          // c_p, paid in full at the start period
  double failure_cost = 0.0;  // w_p
  double trial_prob = 0.1;    // v_p
  int allowed_successes = 0;  // k_p
  int hard_due = 0;           // l_p, latest permissible completion period
  std::vector<ScenarioEdit> edits;

  bool operator==(const Project&) const = default;
};

// Where the network came from, so an instance file can rebuild it.
struct NetworkSource {
  std::string net_path;
  std::string trips_path;
  double capacity_scale = 1.0;
  double demand_scale = 1.0;
  std::string topology = "base";
  std::string topology_file;

  bool operator==(const NetworkSource&) const = default;
};

struct Instance {
  int horizon = 0;
  std::vector<Project> projects;
  std::vector<double> budget;  // b_t, one entry per period
  int max_simultaneous = 1;
  Graph graph;
  DemandMatrix demand;
  double extrapolation = 1.0;
  NetworkSource source;

  std::size_t num_projects() const noexcept { return projects.size(); }

  // Latest start that still completes by the hard due date and the horizon.
  int latest_start(std::size_t p) const {
    const Project& pr = projects[p];
    return std::min(pr.hard_due, horizon) - pr.duration;
  }

  double total_failure_cost() const {
    double s = 0.0;
    for (const Project& p : projects) s += p.failure_cost;
    return s;
  }

  int work_sum() const {
    int s = 0;
    for (const Project& p : projects) s += p.duration;
    return s;
  }
};

// Genotype: one start period per project.
struct Schedule {
  std::vector<int> start;

  bool operator==(const Schedule&) const = default;
  auto operator<=>(const Schedule&) const = default;

  bool active(const Instance& inst, std::size_t p, int t) const {
    return start[p] <= t && t < start[p] + inst.projects[p].duration;
  }

  std::uint64_t hash() const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (int v : start) {
      h ^= static_cast<std::uint32_t>(v);
      h *= 1099511628211ull;
    }
    return h;
  }
};

// ---------------------------------------------------------------------------
// Risk.

// Probability that the asset has failed before period t: more than k_p
// successes in t Bernoulli(v_p) trials, i.e. 1 - BinomCDF(k_p; t, v_p).
inline double failure_prob(const Project& p, int t) {
  if (t <= p.allowed_successes) return 0.0;
  const double v = p.trial_prob;
  if (v >= 1.0) return 1.0;
  if (v <= 0.0) return 0.0;
  // Terms of the CDF via the pmf recurrence, starting from (1-v)^t.
  const double ratio = v / (1.0 - v);
  double term = std::exp(static_cast<double>(t) * std::log1p(-v));
  double cdf = term;
  for (int i = 0; i < p.allowed_successes; ++i) {
    term *= static_cast<double>(t - i) / static_cast<double>(i + 1) * ratio;
    cdf += term;
  }
  return std::clamp(1.0 - cdf, 0.0, 1.0);
}

// First period at which failure becomes more likely than not, capped at the
// horizon.
inline int hard_deadline(const Project& p, int horizon) {
  for (int t = 0; t < horizon; ++t)
    if (failure_prob(p, t) > 0.5 + 1e-12) return t;
  return horizon;
}

inline double risk(const Instance& inst, const Schedule& s) {
  double r = 0.0;
  for (std::size_t p = 0; p < inst.projects.size(); ++p)
    r += failure_prob(inst.projects[p], s.start[p]) * inst.projects[p].failure_cost;
  return r;
}

// ---------------------------------------------------------------------------
// Constraints.

struct Violation {
  enum class Kind { Genotype, Deadline, Simultaneity, Budget };
  Kind kind;
  int project = -1;  // for Genotype / Deadline
  int period = -1;   // for Simultaneity / Budget
  std::string message;
};

inline const char* to_string(Violation::Kind k) {
  switch (k) {
    case Violation::Kind::Genotype: return "genotype";
    case Violation::Kind::Deadline: return "deadline";
    case Violation::Kind::Simultaneity: return "simultaneity";
    case Violation::Kind::Budget: return "budget";
  }
  return "?";
}

namespace detail {

inline bool over_budget(double spent, double available) {
  return spent > available + 1e-9 * std::max(1.0, std::abs(available));
}

}  // namespace detail

// Start-once, contiguity and duration hold by construction of the genotype;
// what remains are deadlines, the simultaneity cap, and the cumulative budget.
inline std::vector<Violation> check_feasible(const Instance& inst, const Schedule& s) {
  std::vector<Violation> out;
  const std::size_t n = inst.projects.size();
  if (s.start.size() != n) {
    out.push_back({Violation::Kind::Genotype, -1, -1, "genotype length does not match project count"});
    return out;
  }
  for (std::size_t p = 0; p < n; ++p) {
    if (s.start[p] < 0 || s.start[p] > inst.latest_start(p)) {
      out.push_back({Violation::Kind::Deadline, static_cast<int>(p), -1,
                     "project " + std::to_string(p) + " starts at " + std::to_string(s.start[p]) +
                         ", latest feasible start is " + std::to_string(inst.latest_start(p))});
    }
  }
  std::vector<int> active(static_cast<std::size_t>(inst.horizon), 0);
  std::vector<double> started(static_cast<std::size_t>(inst.horizon), 0.0);
  for (std::size_t p = 0; p < n; ++p) {
    const int t0 = s.start[p];
    if (t0 >= 0 && t0 < inst.horizon) started[static_cast<std::size_t>(t0)] += inst.projects[p].cost;
    for (int t = std::max(t0, 0); t < std::min(t0 + inst.projects[p].duration, inst.horizon); ++t)
      ++active[static_cast<std::size_t>(t)];
  }
  double spent = 0.0, available = 0.0;
  for (int t = 0; t < inst.horizon; ++t) {
    const auto ti = static_cast<std::size_t>(t);
    if (active[ti] > inst.max_simultaneous)
      out.push_back({Violation::Kind::Simultaneity, -1, t,
                     std::to_string(active[ti]) + " projects active in period " + std::to_string(t) +
                         " (cap " + std::to_string(inst.max_simultaneous) + ")"});
    spent += started[ti];
    available += inst.budget[ti];
    if (detail::over_budget(spent, available))
      out.push_back({Violation::Kind::Budget, -1, t, "cumulative spend exceeds budget in period " + std::to_string(t)});
  }
  return out;
}

inline bool is_feasible(const Instance& inst, const Schedule& s) { return check_feasible(inst, s).empty(); }

// Clamps each start into its feasible window, then sweeps periods in order and
// resolves each simultaneity or budget violation by moving the offending
// project with the latest due date (random tie-break) to start one period
// after the conflict. Throws InfeasibleError when no offender can move or the
// shift limit |P|*horizon is hit.
inline Schedule repair(const Instance& inst, Schedule s, Rng& rng) {
  const std::size_t n = inst.projects.size();
  if (s.start.size() != n) throw Error("repair: genotype length does not match project count");
  for (std::size_t p = 0; p < n; ++p) {
    const int hi = inst.latest_start(p);
    if (hi < 0) throw InfeasibleError("project " + std::to_string(p) + " cannot finish before its due date",
                                      static_cast<int>(p));
    s.start[p] = std::clamp(s.start[p], 0, hi);
  }

  const long max_shifts = static_cast<long>(n) * inst.horizon;
  long shifts = 0;
  std::vector<std::size_t> offenders, best;
  double budget_prefix = 0.0;
  for (int t = 0; t < inst.horizon; ++t) {
    budget_prefix += inst.budget[static_cast<std::size_t>(t)];
    for (;;) {
      offenders.clear();
      int active = 0;
      double spent = 0.0;
      for (std::size_t p = 0; p < n; ++p) {
        if (s.start[p] <= t) spent += inst.projects[p].cost;
        if (s.active(inst, p, t)) ++active;
      }
      if (active > inst.max_simultaneous) {
        for (std::size_t p = 0; p < n; ++p)
          if (s.active(inst, p, t)) offenders.push_back(p);
      } else if (detail::over_budget(spent, budget_prefix)) {
        for (std::size_t p = 0; p < n; ++p)
          if (s.start[p] <= t) offenders.push_back(p);
      } else {
        break;
      }

      best.clear();
      int best_due = std::numeric_limits<int>::min();
      int stuck = -1;
      for (std::size_t p : offenders) {
        if (inst.latest_start(p) < t + 1) {
          if (stuck < 0) stuck = static_cast<int>(p);
          continue;
        }
        const int due = inst.projects[p].hard_due;
        if (due > best_due) {
          best_due = due;
          best.clear();
        }
        if (due == best_due) best.push_back(p);
      }
      if (best.empty())
        throw InfeasibleError("repair: no project can be deferred past period " + std::to_string(t), stuck);
      if (++shifts > max_shifts) throw InfeasibleError("repair: shift limit exceeded");
      std::uniform_int_distribution<std::size_t> pick(0, best.size() - 1);
      s.start[best[best.size() == 1 ? 0 : pick(rng)]] = t + 1;
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Scenarios and travel delay.

inline Scenario active_scenario(const Instance& inst, const Schedule& s, int t) {
  Scenario sc(inst.projects.size());
  for (std::size_t p = 0; p < inst.projects.size(); ++p)
    if (s.active(inst, p, t)) sc.set(p);
  return sc;
}

// Distinct active sets over the horizon with the number of periods each one
// occurs, in order of first occurrence.
inline std::vector<std::pair<Scenario, int>> scenarios_of(const Instance& inst, const Schedule& s) {
  std::vector<std::pair<Scenario, int>> out;
  std::unordered_map<Scenario, std::size_t, ScenarioHash> index;
  for (int t = 0; t < inst.horizon; ++t) {
    Scenario sc = active_scenario(inst, s, t);
    auto [it, fresh] = index.emplace(sc, out.size());
    if (fresh) out.emplace_back(std::move(sc), 1);
    else ++out[it->second].second;
  }
  return out;
}

// Total travel delay: extrapolation * sum over periods of (stt - stt(empty)).
inline double ttd(const Instance& inst, const Schedule& s, const ScenarioCache& cache) {
  const double base = cache.base_stt();
  double total = 0.0;
  for (const auto& [sc, mult] : scenarios_of(inst, s)) {
    const auto v = cache.find(sc);
    if (!v) throw Error("ttd: scenario " + sc.bitstring() + " is not cached");
    total += mult * (*v - base);
  }
  return inst.extrapolation * total;
}

// Link edits in effect while every project in `sc` is ongoing.
inline std::vector<ScenarioEdit> scenario_edits(const Instance& inst, const Scenario& sc) {
  std::vector<ScenarioEdit> edits;
  for (std::size_t p = 0; p < inst.projects.size(); ++p)
    if (sc.test(p)) edits.insert(edits.end(), inst.projects[p].edits.begin(), inst.projects[p].edits.end());
  return merge_edits(std::move(edits));
}

}  // namespace renosched
