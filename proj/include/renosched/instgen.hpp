#pragma once

// Seeded problem-instance generation and the preset sensitivity variants.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "renosched/error.hpp"
#include "renosched/network.hpp"
#include "renosched/tap.hpp"
#include "renosched/upper.hpp"

namespace renosched {

// Link removals/additions plus the capacity factor that offsets them.
// File format, one directive per line, '#' comments, 1-based nodes:
//   capacity_scale <factor>
//   remove <tail> <head>
//   add <tail> <head> <capacity> <length> <fft> [<b> <power>]
struct TopologyEdit {
  std::vector<std::pair<int, int>> remove;
  std::vector<Link> add;
  double capacity_scale = 1.0;
};

inline TopologyEdit parse_topology_edit(std::istream& in) {
  TopologyEdit out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string cmd;
    if (!(ss >> cmd)) continue;
    if (cmd == "capacity_scale") {
      if (!(ss >> out.capacity_scale) || !(out.capacity_scale > 0.0))
        throw ParseError(line_no, "bad capacity_scale");
    } else if (cmd == "remove") {
      int a, b;
      if (!(ss >> a >> b)) throw ParseError(line_no, "remove needs tail and head");
      out.remove.emplace_back(a - 1, b - 1);
    } else if (cmd == "add") {
      Link l;
      int a, b;
      if (!(ss >> a >> b >> l.capacity >> l.length >> l.free_flow_time))
        throw ParseError(line_no, "add needs tail head capacity length fft");
      l.tail = a - 1;
      l.head = b - 1;
      if (!(ss >> l.bpr_a >> l.bpr_b)) {
        l.bpr_a = kDefaultBprA;
        l.bpr_b = kDefaultBprB;
      }
      out.add.push_back(l);
    } else {
      throw ParseError(line_no, "unknown directive '" + cmd + "'");
    }
  }
  return out;
}

// True when every OD pair with demand has a path.
inline bool demand_connected(const Graph& g, const DemandMatrix& dm) {
  const std::vector<double> costs = [&] {
    std::vector<double> c;
    for (const Link& l : g.links()) c.push_back(l.free_flow_time);
    return c;
  }();
  int origin = -1;
  ShortestPathTree tree;
  for (const auto& [od, v] : dm.entries()) {
    if (od.first != origin) {
      origin = od.first;
      tree = shortest_path_tree(g, costs, origin);
    }
    if (!std::isfinite(tree.dist[static_cast<std::size_t>(od.second)])) return false;
  }
  return true;
}

namespace detail {

// Relative paths are tried as given, then against `base_dir`.
inline std::filesystem::path resolve_path(const std::string& s, const std::filesystem::path& base_dir) {
  std::filesystem::path p(s);
  if (p.is_relative() && !std::filesystem::exists(p) && !base_dir.empty()) return base_dir / p;
  return p;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

struct Network {
  Graph graph;
  DemandMatrix demand;
};

// Reads the TNTP pair and applies topology edits, capacity and demand scaling.
inline Network load_network(const NetworkSource& src, const std::filesystem::path& base_dir = {}) {
  auto resolve = [&](const std::string& s) { return detail::resolve_path(s, base_dir); };
  Network net;
  net.graph = parse_tntp_net(detail::read_file(resolve(src.net_path)));
  net.demand = parse_tntp_trips(detail::read_file(resolve(src.trips_path)), net.graph.num_nodes());
  if (!src.topology_file.empty()) {
    std::istringstream in(detail::read_file(resolve(src.topology_file)));
    const TopologyEdit te = parse_topology_edit(in);
    net.graph = edit_topology(net.graph, te.remove, te.add);
    if (!demand_connected(net.graph, net.demand)) throw Error("topology edit disconnects an OD pair");
  }
  if (src.capacity_scale != 1.0) net.graph = scale_capacity(net.graph, src.capacity_scale);
  if (src.demand_scale != 1.0) net.demand = scale_demand(net.demand, src.demand_scale);
  return net;
}

struct GenConfig {
  std::uint64_t seed = 1;
  int horizon = 80;
  double duration_mean = 5.0;
  int max_duration = 12;
  double budget_factor = 1.7;
  int max_simultaneous = 8;
  double capacity_scale = 1.0;
  double demand_scale = 1.0;
  std::string topology = "base";
  bool unconstrained = false;
  bool tight = false;
  int project_count = 0;  // 0: one project per link; otherwise a seeded subset of links
  double cost_per_period = 1.0;
  double failure_cost_lo = 5.0;  // multiples of the mean project cost
  double failure_cost_hi = 50.0;
  double trial_prob_lo = 0.02;
  double trial_prob_hi = 0.15;
  int successes_max = 6;
  double extrapolation = 1.0;
  std::string variant = "base";
};

inline const std::vector<std::string>& variant_names() {
  static const std::vector<std::string> names{"base",          "cap09",          "cap11",         "capmax", "tight",
                                              "unconstrained", "less_connected", "more_connected"};
  return names;
}

inline GenConfig variant(GenConfig cfg, const std::string& name) {
  cfg.variant = name;
  if (name == "base") return cfg;
  if (name == "cap09") {
    cfg.capacity_scale = 0.9;
    cfg.demand_scale = 1.2;
  } else if (name == "cap11") {
    cfg.capacity_scale = 1.1;
    cfg.demand_scale = 0.8;
  } else if (name == "capmax") {
    cfg.capacity_scale = 100.0;
    cfg.demand_scale = 0.5;
  } else if (name == "tight") {
    cfg.tight = true;
    cfg.budget_factor = 1.05;
    cfg.max_simultaneous = 6;
  } else if (name == "unconstrained") {
    cfg.unconstrained = true;
  } else if (name == "less_connected" || name == "more_connected") {
    cfg.topology = name;
  } else {
    throw Error("unknown variant '" + name + "'");
  }
  return cfg;
}

// Generates projects on `graph` (already scaled/edited). Each project closes
// one link. Throws InfeasibleError if no schedulable portfolio is found.
inline Instance generate(const Graph& graph, const DemandMatrix& demand, const GenConfig& cfg,
                         NetworkSource source = {}) {
  if (!(cfg.duration_mean > 0.0)) throw Error("duration mean must be positive");
  if (!(cfg.budget_factor > 0.0)) throw Error("budget factor must be positive");
  if (cfg.horizon < 1) throw Error("horizon must be at least 1");
  if (cfg.max_simultaneous < 1) throw Error("simultaneity cap must be at least 1");

  Rng rng(cfg.seed);
  std::vector<int> link_ids(graph.num_links());
  std::iota(link_ids.begin(), link_ids.end(), 0);
  if (cfg.project_count > 0) {
    if (static_cast<std::size_t>(cfg.project_count) > link_ids.size()) throw Error("more projects than links");
    std::shuffle(link_ids.begin(), link_ids.end(), rng);
    link_ids.resize(static_cast<std::size_t>(cfg.project_count));
    std::sort(link_ids.begin(), link_ids.end());
  }

  Instance inst;
  inst.horizon = cfg.horizon;
  inst.graph = graph;
  inst.demand = demand;
  inst.extrapolation = cfg.extrapolation;
  inst.source = std::move(source);

  std::poisson_distribution<int> dur(cfg.duration_mean);
  std::uniform_real_distribution<double> vdist(cfg.trial_prob_lo, cfg.trial_prob_hi);
  std::uniform_int_distribution<int> kdist(0, cfg.successes_max);
  auto draw_risk = [&](Project& p) {
    p.trial_prob = vdist(rng);
    p.allowed_successes = kdist(rng);
    p.hard_due = hard_deadline(p, cfg.horizon);
  };
  auto schedulable = [&](const Project& p) { return std::min(p.hard_due, cfg.horizon) - p.duration >= 0; };

  constexpr int kMaxRedraws = 100;
  auto redraw_until_schedulable = [&](Project& p) {
    for (int redraws = 0; !schedulable(p); draw_risk(p))
      if (++redraws > kMaxRedraws) throw InfeasibleError("no schedulable risk parameters after 100 redraws", p.id);
  };
  for (std::size_t i = 0; i < link_ids.size(); ++i) {
    Project p;
    p.id = static_cast<int>(i);
    p.duration = std::clamp(dur(rng), 1, std::min(cfg.max_duration, cfg.horizon));
    p.cost = cfg.cost_per_period * p.duration;
    p.edits = {closure_edit(graph.link(link_ids[i]))};
    draw_risk(p);
    redraw_until_schedulable(p);
    inst.projects.push_back(std::move(p));
  }

  double mean_cost = 0.0, total_cost = 0.0;
  for (const Project& p : inst.projects) total_cost += p.cost;
  if (!inst.projects.empty()) mean_cost = total_cost / static_cast<double>(inst.projects.size());
  std::uniform_real_distribution<double> wdist(cfg.failure_cost_lo * mean_cost, cfg.failure_cost_hi * mean_cost);
  for (Project& p : inst.projects) p.failure_cost = wdist(rng);

  const int n = static_cast<int>(inst.projects.size());
  if (cfg.unconstrained) {
    inst.max_simultaneous = std::max(n, 1);
    inst.budget.assign(static_cast<std::size_t>(cfg.horizon), std::max(total_cost, 1.0));
  } else {
    inst.max_simultaneous = cfg.max_simultaneous;
    inst.budget.assign(static_cast<std::size_t>(cfg.horizon), cfg.budget_factor * total_cost / cfg.horizon);
  }

  // Require that repairing the all-zeros genotype succeeds; otherwise redraw
  // the risk parameters of the project repair got stuck on.
  std::vector<int> repair_redraws(inst.projects.size(), 0);
  for (;;) {
    Rng probe(cfg.seed ^ 0x9e3779b97f4a7c15ull);
    try {
      repair(inst, Schedule{std::vector<int>(inst.projects.size(), 0)}, probe);
      break;
    } catch (const InfeasibleError& e) {
      std::size_t victim = 0;
      if (e.project() >= 0) {
        victim = static_cast<std::size_t>(e.project());
      } else {
        for (std::size_t p = 1; p < inst.projects.size(); ++p)
          if (inst.latest_start(p) < inst.latest_start(victim)) victim = p;
      }
      if (++repair_redraws[victim] > kMaxRedraws)
        throw InfeasibleError("instance has no feasible schedule after 100 redraws of project " +
                                  std::to_string(victim),
                              static_cast<int>(victim));
      Project& p = inst.projects[victim];
      draw_risk(p);
      redraw_until_schedulable(p);
    }
  }
  return inst;
}

// Applies the variant's network transforms to the source, then generates.
inline Instance generate_from_source(NetworkSource src, const GenConfig& cfg,
                                     const std::filesystem::path& base_dir = {}) {
  src.capacity_scale *= cfg.capacity_scale;
  src.demand_scale *= cfg.demand_scale;
  src.topology = cfg.topology;
  if (cfg.topology != "base" && src.topology_file.empty())
    throw Error("topology '" + cfg.topology + "' needs an edit file");
  if (!src.topology_file.empty()) {
    std::istringstream in(detail::read_file(detail::resolve_path(src.topology_file, base_dir)));
    src.capacity_scale *= parse_topology_edit(in).capacity_scale;
  }
  const Network net = load_network(src, base_dir);
  return generate(net.graph, net.demand, cfg, std::move(src));
}

}  // namespace renosched
