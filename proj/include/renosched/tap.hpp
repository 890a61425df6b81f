#pragma once

// Link-based Frank-Wolfe solver for the static user-equilibrium traffic
// assignment problem.

#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "renosched/error.hpp"
#include "renosched/network.hpp"

namespace renosched {

// Aggregate link flows (veh/h) indexed by link id.
using FlowPattern = std::vector<double>;

class UnreachableError : public Error {
 public:
  UnreachableError(int origin, int destination)
      : Error("OD pair (" + std::to_string(origin + 1) + "," + std::to_string(destination + 1) +
              ") is unreachable"),
        origin_(origin),
        destination_(destination) {}

  int origin() const noexcept { return origin_; }
  int destination() const noexcept { return destination_; }

 private:
  int origin_, destination_;
};

struct ShortestPathTree {
  std::vector<double> dist;    // +inf when unreachable
  std::vector<int> pred_link;  // -1 for the origin and unreachable nodes
};

// Dijkstra with a binary heap. Among equal-cost predecessors the smallest link
// id wins, so trees are reproducible. Zone nodes (index < first thru node) are
// never expanded unless they are the origin.
inline ShortestPathTree shortest_path_tree(const Graph& g, std::span<const double> costs, int origin) {
  const auto n = static_cast<std::size_t>(g.num_nodes());
  constexpr double inf = std::numeric_limits<double>::infinity();
  ShortestPathTree t{std::vector<double>(n, inf), std::vector<int>(n, -1)};
  std::vector<char> done(n, 0);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  t.dist[static_cast<std::size_t>(origin)] = 0.0;
  heap.emplace(0.0, origin);
  const auto& links = g.links();
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    const auto ui = static_cast<std::size_t>(u);
    if (done[ui]) continue;
    done[ui] = 1;
    if (u != origin && u < g.first_thru_node()) continue;
    for (int id : g.out_links(u)) {
      const Link& l = links[static_cast<std::size_t>(id)];
      const auto vi = static_cast<std::size_t>(l.head);
      if (done[vi]) continue;
      const double nd = d + costs[static_cast<std::size_t>(id)];
      if (nd < t.dist[vi]) {
        t.dist[vi] = nd;
        t.pred_link[vi] = id;
        heap.emplace(nd, l.head);
      } else if (nd == t.dist[vi] && id < t.pred_link[vi]) {
        t.pred_link[vi] = id;
      }
    }
  }
  return t;
}

inline ShortestPathTree shortest_path_tree(const NetworkView& view, std::span<const double> costs,
                                           int origin) {
  return shortest_path_tree(view.graph(), costs, origin);
}

inline FlowPattern all_or_nothing(const NetworkView& view, std::span<const double> costs,
                                  const DemandMatrix& demand) {
  const Graph& g = view.graph();
  FlowPattern flows(g.num_links(), 0.0);
  const auto& entries = demand.entries();
  for (auto it = entries.begin(); it != entries.end();) {
    const int origin = it->first.first;
    const ShortestPathTree tree = shortest_path_tree(g, costs, origin);
    for (; it != entries.end() && it->first.first == origin; ++it) {
      const int dest = it->first.second;
      if (tree.pred_link[static_cast<std::size_t>(dest)] < 0) throw UnreachableError(origin, dest);
      for (int node = dest; node != origin;) {
        const int id = tree.pred_link[static_cast<std::size_t>(node)];
        flows[static_cast<std::size_t>(id)] += it->second;
        node = g.links()[static_cast<std::size_t>(id)].tail;
      }
    }
  }
  return flows;
}

inline std::vector<double> link_costs(const NetworkView& view, const FlowPattern& flows) {
  std::vector<double> c(flows.size());
  for (std::size_t i = 0; i < flows.size(); ++i) c[i] = view.cost(static_cast<int>(i), flows[i]);
  return c;
}

// Beckmann objective: sum of link cost integrals.
inline double beckmann_objective(const NetworkView& view, const FlowPattern& flows) {
  double s = 0.0;
  for (std::size_t i = 0; i < flows.size(); ++i) s += view.cost_integral(static_cast<int>(i), flows[i]);
  return s;
}

// Step size in [0,1] minimizing the Beckmann objective on the segment
// current + alpha*(target - current). Bisection on the directional derivative.
inline double line_search(const NetworkView& view, const FlowPattern& current, const FlowPattern& target) {
  const std::size_t n = current.size();
  std::vector<double> delta(n);
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    delta[i] = target[i] - current[i];
    any = any || delta[i] != 0.0;
  }
  if (!any) return 0.0;

  auto slope = [&](double alpha) {
    double g = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (delta[i] != 0.0) g += delta[i] * view.cost(static_cast<int>(i), current[i] + alpha * delta[i]);
    return g;
  };

  if (slope(0.0) >= 0.0) return 0.0;
  if (slope(1.0) <= 0.0) return 1.0;
  double lo = 0.0, hi = 1.0, mid = 0.5;
  for (int it = 0; it < 64; ++it) {
    mid = 0.5 * (lo + hi);
    const double g = slope(mid);
    if (std::abs(g) <= 1e-10) break;
    if (g < 0.0) lo = mid;
    else hi = mid;
  }
  return mid;
}

struct TapOptions {
  double tol = 1e-4;  // relative gap
  int max_iters = 4000;
  bool record_history = false;
};

struct TapResult {
  FlowPattern flows;
  std::vector<double> link_costs;
  double system_travel_time = 0.0;  // vehicle-minutes
  double relative_gap = 0.0;
  int iterations = 0;
  bool converged = false;
  // Largest absolute link-flow change in the last update. Reported only.
  double max_flow_change = 0.0;
  // Filled when TapOptions::record_history is set, one entry per iteration.
  std::vector<double> gap_history;
  std::vector<double> objective_history;
};

inline double system_travel_time(const FlowPattern& flows, std::span<const double> costs) {
  double s = 0.0;
  for (std::size_t i = 0; i < flows.size(); ++i) s += flows[i] * costs[i];
  return s;
}

inline double system_travel_time(const TapResult& r) { return system_travel_time(r.flows, r.link_costs); }

// Frank-Wolfe: start from all-or-nothing at free-flow costs, then alternate
// direction finding and exact line search until the relative gap
// (sum f*c - sum y*c) / sum f*c drops to `tol`.
inline TapResult solve_ue(const NetworkView& view, const DemandMatrix& demand, const TapOptions& opt = {}) {
  if (!(opt.tol > 0.0)) throw Error("solve_ue: tol must be positive");
  if (opt.max_iters < 1) throw Error("solve_ue: max_iters must be >= 1");

  const std::size_t n = view.num_links();
  std::vector<double> costs(n);
  for (std::size_t i = 0; i < n; ++i) costs[i] = view.cost(static_cast<int>(i), 0.0);

  TapResult res;
  FlowPattern x = all_or_nothing(view, costs, demand);
  FlowPattern best = x;
  double best_gap = std::numeric_limits<double>::infinity();

  for (int k = 1; k <= opt.max_iters; ++k) {
    costs = link_costs(view, x);
    const FlowPattern y = all_or_nothing(view, costs, demand);
    const double tt = system_travel_time(x, costs);
    const double sptt = system_travel_time(y, costs);
    const double gap = tt > 0.0 ? std::max(0.0, (tt - sptt) / tt) : 0.0;
    res.iterations = k;
    if (opt.record_history) {
      res.gap_history.push_back(gap);
      res.objective_history.push_back(beckmann_objective(view, x));
    }
    if (gap < best_gap) {
      best_gap = gap;
      best = x;
    }
    if (gap <= opt.tol) {
      res.converged = true;
      break;
    }
    if (k == opt.max_iters) break;
    const double alpha = line_search(view, x, y);
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double nx = x[i] + alpha * (y[i] - x[i]);
      change = std::max(change, std::abs(nx - x[i]));
      x[i] = nx;
    }
    res.max_flow_change = change;
  }

  res.flows = std::move(best);
  res.relative_gap = best_gap;
  res.link_costs = link_costs(view, res.flows);
  res.system_travel_time = system_travel_time(res.flows, res.link_costs);
  return res;
}

// `link_id,flow,cost` rows.
inline void write_tap_csv(std::ostream& out, const TapResult& r) {
  out << "link_id,flow,cost\n";
  for (std::size_t i = 0; i < r.flows.size(); ++i)
    out << i << ',' << detail::format_double(r.flows[i]) << ',' << detail::format_double(r.link_costs[i])
        << '\n';
}

inline void write_tap_sidecar(std::ostream& out, const TapResult& r) {
  out << "{\"gap\": " << detail::format_double(r.relative_gap) << ", \"iterations\": " << r.iterations
      << ", \"stt\": " << detail::format_double(r.system_travel_time)
      << ", \"converged\": " << (r.converged ? "true" : "false") << "}\n";
}

}  // namespace renosched
