#pragma once

// NSGA-II building blocks over integer start-time genotypes: dominance,
// non-dominated sorting, crowding distance, binary tournament, uniform
// crossover and bounded shift mutation.

#include <algorithm>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "renosched/metrics.hpp"
#include "renosched/upper.hpp"

namespace renosched {

struct Objectives {
  double ttd = 0.0;
  double risk = 0.0;

  bool operator==(const Objectives&) const = default;
  Point2 point() const { return {ttd, risk}; }
};

// Minimization: a <= b everywhere and a < b somewhere.
inline bool dominates(const Objectives& a, const Objectives& b) {
  return a.ttd <= b.ttd && a.risk <= b.risk && (a.ttd < b.ttd || a.risk < b.risk);
}

enum class EvalStatus { Unevaluated, Exact, Pruned };

inline const char* to_string(EvalStatus s) {
  switch (s) {
    case EvalStatus::Unevaluated: return "unevaluated";
    case EvalStatus::Exact: return "exact";
    case EvalStatus::Pruned: return "pruned";
  }
  return "?";
}

struct Individual {
  Schedule schedule;
  std::optional<Objectives> objectives;  // exact values, or the pruning estimate
  std::optional<int> rank;
  std::optional<double> crowding;
  EvalStatus status = EvalStatus::Unevaluated;
};

// Fast non-dominated sort. Front 0 first; indices ascending within a front.
inline std::vector<std::vector<std::size_t>> non_dominated_sort(std::span<const Objectives> pts) {
  const std::size_t n = pts.size();
  std::vector<std::vector<std::size_t>> dominated_by(n);
  std::vector<std::size_t> count(n, 0);
  std::vector<std::vector<std::size_t>> fronts;
  std::vector<std::size_t> current;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dominates(pts[i], pts[j])) {
        dominated_by[i].push_back(j);
        ++count[j];
      } else if (dominates(pts[j], pts[i])) {
        dominated_by[j].push_back(i);
        ++count[i];
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (count[i] == 0) current.push_back(i);
  while (!current.empty()) {
    std::vector<std::size_t> next;
    for (std::size_t i : current)
      for (std::size_t j : dominated_by[i])
        if (--count[j] == 0) next.push_back(j);
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(current));
    current = std::move(next);
  }
  return fronts;
}

// Boundary points on each objective get +inf; interior points sum the
// normalized neighbour gaps. Objectives with zero range contribute 0.
inline std::vector<double> crowding_distance(std::span<const Objectives> front) {
  const std::size_t n = front.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> d(n, 0.0);
  if (n <= 2) {
    std::fill(d.begin(), d.end(), inf);
    return d;
  }
  std::vector<std::size_t> idx(n);
  for (int m = 0; m < 2; ++m) {
    auto val = [&](std::size_t i) { return m == 0 ? front[i].ttd : front[i].risk; };
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return val(a) < val(b); });
    const double range = val(idx.back()) - val(idx.front());
    d[idx.front()] = inf;
    d[idx.back()] = inf;
    if (range <= 0.0) continue;
    for (std::size_t k = 1; k + 1 < n; ++k)
      if (d[idx[k]] != inf) d[idx[k]] += (val(idx[k + 1]) - val(idx[k - 1])) / range;
  }
  return d;
}

// Assigns rank and crowding to every individual (all must have objectives).
inline void rank_population(std::vector<Individual>& pop) {
  std::vector<Objectives> pts;
  pts.reserve(pop.size());
  for (const Individual& ind : pop) pts.push_back(*ind.objectives);
  const auto fronts = non_dominated_sort(pts);
  for (std::size_t r = 0; r < fronts.size(); ++r) {
    std::vector<Objectives> fp;
    for (std::size_t i : fronts[r]) fp.push_back(pts[i]);
    const auto cd = crowding_distance(fp);
    for (std::size_t k = 0; k < fronts[r].size(); ++k) {
      pop[fronts[r][k]].rank = static_cast<int>(r);
      pop[fronts[r][k]].crowding = cd[k];
    }
  }
}

// Keeps the best `n` by (rank, crowding descending); ties keep the earlier
// index. Returns survivors ranked on the merged pool.
inline std::vector<Individual> truncate_population(std::vector<Individual> pool, std::size_t n) {
  rank_population(pool);
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (*pool[a].rank != *pool[b].rank) return *pool[a].rank < *pool[b].rank;
    return *pool[a].crowding > *pool[b].crowding;
  });
  std::vector<Individual> out;
  out.reserve(std::min(n, pool.size()));
  for (std::size_t k = 0; k < order.size() && k < n; ++k) out.push_back(std::move(pool[order[k]]));
  return out;
}

// Binary tournament between two distinct members: lower rank, then larger
// crowding, then a coin flip.
inline std::size_t tournament_select(std::span<const Individual> pop, Rng& rng) {
  if (pop.empty()) throw Error("tournament on an empty population");
  if (pop.size() == 1) return 0;
  std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
  const std::size_t a = pick(rng);
  std::size_t b = pick(rng);
  while (b == a) b = pick(rng);
  const Individual& x = pop[a];
  const Individual& y = pop[b];
  const int rx = x.rank.value_or(std::numeric_limits<int>::max());
  const int ry = y.rank.value_or(std::numeric_limits<int>::max());
  if (rx != ry) return rx < ry ? a : b;
  const double cx = x.crowding.value_or(0.0), cy = y.crowding.value_or(0.0);
  if (cx != cy) return cx > cy ? a : b;
  return std::bernoulli_distribution(0.5)(rng) ? a : b;
}

// Gene-wise swap with probability 0.5 when crossover fires; no repair.
inline std::pair<Schedule, Schedule> uniform_crossover(const Schedule& a, const Schedule& b, Rng& rng,
                                                       double rate) {
  Schedule c1 = a, c2 = b;
  if (!std::bernoulli_distribution(rate)(rng)) return {c1, c2};
  std::bernoulli_distribution coin(0.5);
  for (std::size_t p = 0; p < a.start.size(); ++p)
    if (coin(rng)) std::swap(c1.start[p], c2.start[p]);
  return {c1, c2};
}

inline constexpr double kDefaultCrossoverRate = 0.9;
inline constexpr int kMutationStep = 4;

// Uniform crossover followed by repair. A child whose repair fails is redrawn
// (up to 8 attempts) and otherwise replaced by its parent.
inline std::pair<Schedule, Schedule> crossover(const Instance& inst, const Schedule& a, const Schedule& b,
                                               Rng& rng, double rate = kDefaultCrossoverRate) {
  std::optional<Schedule> out1, out2;
  for (int attempt = 0; attempt < 8 && !(out1 && out2); ++attempt) {
    auto [c1, c2] = uniform_crossover(a, b, rng, rate);
    try {
      if (!out1) out1 = repair(inst, std::move(c1), rng);
    } catch (const InfeasibleError&) {
    }
    try {
      if (!out2) out2 = repair(inst, std::move(c2), rng);
    } catch (const InfeasibleError&) {
    }
  }
  return {out1.value_or(a), out2.value_or(b)};
}

// Shifts each gene with probability `rate` by a nonzero step in [-4, 4],
// clamped to the gene's window. `mutated`, if given, flags touched genes.
inline Schedule perturb(const Instance& inst, Schedule s, Rng& rng, double rate,
                        std::vector<char>* mutated = nullptr) {
  std::bernoulli_distribution fire(rate);
  std::uniform_int_distribution<int> step(1, 2 * kMutationStep);
  if (mutated) mutated->assign(s.start.size(), 0);
  for (std::size_t p = 0; p < s.start.size(); ++p) {
    if (!fire(rng)) continue;
    int delta = step(rng) - kMutationStep - 1;  // -4..3
    if (delta >= 0) ++delta;                    // -4..-1, 1..4
    s.start[p] = std::clamp(s.start[p] + delta, 0, std::max(inst.latest_start(p), 0));
    if (mutated) (*mutated)[p] = 1;
  }
  return s;
}

inline double default_mutation_rate(const Instance& inst) {
  return inst.projects.empty() ? 0.0 : 1.0 / static_cast<double>(inst.projects.size());
}

// Perturb then repair; on repair failure the input comes back unchanged.
inline Schedule mutate(const Instance& inst, const Schedule& s, Rng& rng, double rate) {
  try {
    return repair(inst, perturb(inst, s, rng, rate), rng);
  } catch (const InfeasibleError&) {
    return s;
  }
}

}  // namespace renosched
