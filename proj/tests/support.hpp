#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "renosched/instgen.hpp"
#include "renosched/nsga2.hpp"
#include "renosched/scenario.hpp"
#include "renosched/surrogate.hpp"
#include "renosched/network.hpp"
#include "renosched/upper.hpp"

namespace rs_test {

using namespace renosched;

inline std::string data_path(const std::string& rel) { return std::string(RENOSCHED_DATA_DIR) + "/" + rel; }
inline std::string sf_net_path() { return data_path("sioux_falls/SiouxFalls_net.tntp"); }
inline std::string sf_trips_path() { return data_path("sioux_falls/SiouxFalls_trips.tntp"); }

inline const Network& sioux_falls() {
  static const Network net = [] {
    NetworkSource src;
    src.net_path = sf_net_path();
    src.trips_path = sf_trips_path();
    return load_network(src);
  }();
  return net;
}

inline Link make_link(int id, int tail, int head, double capacity, double fft, double a = kDefaultBprA,
                      double b = kDefaultBprB) {
  Link l;
  l.id = id;
  l.tail = tail;
  l.head = head;
  l.capacity = capacity;
  l.free_flow_time = fft;
  l.bpr_a = a;
  l.bpr_b = b;
  return l;
}

// Two nodes joined by parallel links with the given free-flow times.
inline Graph parallel_links(std::vector<double> ffts, double capacity = 100.0) {
  std::vector<Link> links;
  for (std::size_t i = 0; i < ffts.size(); ++i)
    links.push_back(make_link(static_cast<int>(i), 0, 1, capacity, ffts[i]));
  return Graph(2, std::move(links));
}

// Square 0-1-3-2-0 with a diagonal pair 1<->2, every connection two-way.
inline Graph four_node_graph() {
  const int ends[][2] = {{0, 1}, {1, 0}, {1, 3}, {3, 1}, {0, 2}, {2, 0}, {2, 3}, {3, 2}, {1, 2}, {2, 1}};
  const double fft[] = {4, 4, 5, 5, 6, 6, 3, 3, 2, 2};
  const double cap[] = {300, 300, 250, 250, 280, 280, 320, 320, 150, 150};
  std::vector<Link> links;
  for (int i = 0; i < 10; ++i) links.push_back(make_link(i, ends[i][0], ends[i][1], cap[i], fft[i]));
  return Graph(4, std::move(links));
}

inline DemandMatrix four_node_demand() {
  DemandMatrix dm;
  dm.set(0, 3, 400);
  dm.set(3, 0, 300);
  dm.set(1, 2, 120);
  dm.set(2, 1, 100);
  return dm;
}

// Small scheduling instance on the four-node network. Early projects close
// links that share traffic, so overlapping them costs more than the sum.
inline Instance toy_instance(int num_projects, int horizon, std::uint64_t seed, double budget_factor = 2.0,
                             int m = 3) {
  Instance inst;
  inst.horizon = horizon;
  inst.graph = four_node_graph();
  inst.demand = four_node_demand();
  inst.max_simultaneous = m;
  Rng rng(seed);
  std::uniform_int_distribution<int> dur(1, 4);
  const int order[] = {0, 4, 2, 6, 8, 1, 5, 3, 7, 9};
  std::uniform_real_distribution<double> v(0.05, 0.3);
  std::uniform_int_distribution<int> k(0, 2);
  std::uniform_real_distribution<double> w(10.0, 100.0);
  double total = 0.0;
  for (int p = 0; p < num_projects; ++p) {
    Project pr;
    pr.id = p;
    pr.duration = dur(rng);
    pr.cost = pr.duration;
    total += pr.cost;
    pr.failure_cost = w(rng);
    do {
      pr.trial_prob = v(rng);
      pr.allowed_successes = k(rng);
      pr.hard_due = hard_deadline(pr, horizon);
    } while (std::min(pr.hard_due, horizon) - pr.duration < horizon / 2);
    const Link& l = inst.graph.link(order[p % 10]);
    pr.edits = {p < 10 ? closure_edit(l) : ScenarioEdit{l.id, l.capacity * 0.3, l.free_flow_time * 1.5}};
    inst.projects.push_back(pr);
  }
  inst.budget.assign(static_cast<std::size_t>(horizon), budget_factor * total / horizon);
  return inst;
}

// Two projects on twelve periods: small enough to enumerate.
inline Instance two_project_instance(std::uint64_t seed) { return toy_instance(2, 12, seed, 3.0, 2); }

// Distinct objective vectors of the non-dominated feasible genotypes, found by
// enumerating every start combination.
inline std::vector<Objectives> exhaustive_front(const Instance& inst, const SimulateFn& simulate) {
  const std::size_t n = inst.num_projects();
  ScenarioCache cache(n);
  cache.insert(Scenario(n), simulate(Scenario(n)));
  std::vector<Objectives> all;
  Schedule s{std::vector<int>(n, 0)};
  for (;;) {
    if (is_feasible(inst, s)) {
      for (const auto& [sc, _] : scenarios_of(inst, s))
        if (!cache.contains(sc)) cache.insert(sc, simulate(sc));
      all.push_back({ttd(inst, s, cache), risk(inst, s)});
    }
    std::size_t p = 0;
    while (p < n && ++s.start[p] > std::max(inst.latest_start(p), 0)) s.start[p++] = 0;
    if (p == n) break;
  }
  std::vector<Objectives> front;
  for (const Objectives& o : all) {
    const bool dominated = std::any_of(all.begin(), all.end(), [&](const Objectives& x) { return dominates(x, o); });
    if (!dominated && std::find(front.begin(), front.end(), o) == front.end()) front.push_back(o);
  }
  std::sort(front.begin(), front.end(), [](const Objectives& a, const Objectives& b) {
    return a.ttd != b.ttd ? a.ttd < b.ttd : a.risk < b.risk;
  });
  return front;
}

// Exact stt minus a non-negative, scenario-seeded fraction of the delay: a
// guaranteed lower bound. With `noise` = 0 it is exact.
class OracleSurrogate final : public Surrogate {
 public:
  OracleSurrogate(SimulateFn simulate, double noise, std::uint64_t seed)
      : simulate_(std::move(simulate)), noise_(noise), seed_(seed) {}

  double estimate(const Scenario& sc, const ScenarioCache& cache) const override {
    auto it = memo_.find(sc.bitstring());
    if (it == memo_.end()) it = memo_.emplace(sc.bitstring(), simulate_(sc)).first;
    const double exact = it->second;
    Rng rng(seed_ ^ sc.hash());
    const double cut = std::uniform_real_distribution<double>(0.0, noise_)(rng);
    return exact - cut * std::max(0.0, exact - cache.base_stt());
  }
  std::string name() const override { return "oracle"; }

 private:
  SimulateFn simulate_;
  double noise_;
  std::uint64_t seed_;
  mutable std::map<std::string, double> memo_;
};

}  // namespace rs_test
