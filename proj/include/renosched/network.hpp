#pragma once

// Road network model: links with BPR congestion parameters, OD demand, TNTP
// ingestion, and per-scenario costing views.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "renosched/error.hpp"

namespace renosched {

inline constexpr double kDefaultBprA = 0.15;
inline constexpr double kDefaultBprB = 4.0;

// Full closures are modelled as a near-zero capacity and a huge free-flow time
// so every OD pair stays connected.
inline constexpr double kClosureCapacityFactor = 1e-6;
inline constexpr double kClosureFftFactor = 1e6;

struct Link {
  int id = 0;
  int tail = 0;  // 0-based node index
  int head = 0;
  double capacity = 0.0;        // vehicles/hour
  double length = 0.0;
  double free_flow_time = 0.0;  // minutes
  double bpr_a = kDefaultBprA;
  double bpr_b = kDefaultBprB;
  double speed_limit = 0.0;
  double toll = 0.0;
  int link_type = 1;

  bool operator==(const Link&) const = default;
};

class Graph {
 public:
  Graph() = default;

  // `first_thru_node` is 0-based: nodes with a smaller index are zones that
  // paths may start or end at but never pass through.
  Graph(int num_nodes, std::vector<Link> links, int first_thru_node = 0,
        int num_zones = -1)
      : num_nodes_(num_nodes),
        num_zones_(num_zones < 0 ? num_nodes : num_zones),
        first_thru_node_(first_thru_node),
        links_(std::move(links)),
        out_links_(static_cast<std::size_t>(std::max(num_nodes, 0))) {
    if (num_nodes_ < 0) throw Error("negative node count");
    for (std::size_t i = 0; i < links_.size(); ++i) {
      Link& l = links_[i];
      if (l.id != static_cast<int>(i)) throw Error("link ids must be dense from 0");
      if (l.tail < 0 || l.tail >= num_nodes_ || l.head < 0 || l.head >= num_nodes_)
        throw Error("link " + std::to_string(i) + " references an unknown node");
      if (!(l.free_flow_time > 0.0)) throw Error("link " + std::to_string(i) + ": free-flow time must be positive");
      if (!(l.capacity > 0.0)) throw Error("link " + std::to_string(i) + ": capacity must be positive");
      if (l.bpr_a < 0.0 || l.bpr_b < 1.0) throw Error("link " + std::to_string(i) + ": invalid BPR parameters");
      out_links_[static_cast<std::size_t>(l.tail)].push_back(l.id);
    }
  }

  int num_nodes() const noexcept { return num_nodes_; }
  int num_zones() const noexcept { return num_zones_; }
  int first_thru_node() const noexcept { return first_thru_node_; }
  std::size_t num_links() const noexcept { return links_.size(); }
  const std::vector<Link>& links() const noexcept { return links_; }
  const Link& link(int id) const { return links_.at(static_cast<std::size_t>(id)); }

  std::span<const int> out_links(int node) const {
    return out_links_[static_cast<std::size_t>(node)];
  }

  // Returns the id of the first link tail->head, or -1.
  int find_link(int tail, int head) const {
    for (int id : out_links(tail))
      if (links_[static_cast<std::size_t>(id)].head == head) return id;
    return -1;
  }

  bool operator==(const Graph& o) const {
    return num_nodes_ == o.num_nodes_ && num_zones_ == o.num_zones_ &&
           first_thru_node_ == o.first_thru_node_ && links_ == o.links_;
  }

 private:
  int num_nodes_ = 0;
  int num_zones_ = 0;
  int first_thru_node_ = 0;
  std::vector<Link> links_;
  std::vector<std::vector<int>> out_links_;
};

// Origin-destination demand in vehicles/hour, keyed by 0-based node pairs.
class DemandMatrix {
 public:
  using Pair = std::pair<int, int>;

  void set(int origin, int destination, double demand) {
    if (origin == destination) throw Error("OD pair with origin == destination");
    if (!(demand >= 0.0)) throw Error("negative OD demand");
    if (demand == 0.0) {
      entries_.erase({origin, destination});
      return;
    }
    entries_[{origin, destination}] = demand;
  }

  double get(int origin, int destination) const {
    auto it = entries_.find({origin, destination});
    return it == entries_.end() ? 0.0 : it->second;
  }

  // Sorted by (origin, destination).
  const std::map<Pair, double>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  double total() const {
    double s = 0.0;
    for (const auto& [_, v] : entries_) s += v;
    return s;
  }

  bool operator==(const DemandMatrix&) const = default;

 private:
  std::map<Pair, double> entries_;
};

struct ScenarioEdit {
  int link_id = 0;
  double capacity = 0.0;        // adjusted capacity during the project
  double free_flow_time = 0.0;  // adjusted free-flow time during the project

  bool operator==(const ScenarioEdit&) const = default;
};

inline ScenarioEdit closure_edit(const Link& link) {
  return {link.id, link.capacity * kClosureCapacityFactor,
          link.free_flow_time * kClosureFftFactor};
}

namespace detail {

// (flow/capacity)^b with a fast path for the usual integral exponents.
inline double bpr_power(double ratio, double b) {
  if (b == 4.0) {
    const double r2 = ratio * ratio;
    return r2 * r2;
  }
  if (b == 1.0) return ratio;
  if (b == 2.0) return ratio * ratio;
  return std::pow(ratio, b);
}

}  // namespace detail

// BPR travel time in minutes.
inline double link_cost(const Link& link, double flow,
                        std::optional<double> capacity_override = std::nullopt,
                        std::optional<double> fft_override = std::nullopt) {
  const double cap = capacity_override.value_or(link.capacity);
  const double fft = fft_override.value_or(link.free_flow_time);
  return fft * (1.0 + link.bpr_a * detail::bpr_power(flow / cap, link.bpr_b));
}

// Closed-form integral of the BPR function from 0 to `flow`; the Beckmann
// objective is the sum of these over links.
inline double link_cost_integral(const Link& link, double flow,
                                 std::optional<double> capacity_override = std::nullopt,
                                 std::optional<double> fft_override = std::nullopt) {
  const double cap = capacity_override.value_or(link.capacity);
  const double fft = fft_override.value_or(link.free_flow_time);
  return fft * flow *
         (1.0 + link.bpr_a / (link.bpr_b + 1.0) * detail::bpr_power(flow / cap, link.bpr_b));
}

// A costing view over a base graph with per-link capacity and free-flow time
// overrides. The graph must outlive the view.
class NetworkView {
 public:
  explicit NetworkView(const Graph& graph)
      : graph_(&graph),
        capacity_(graph.num_links()),
        fft_(graph.num_links()) {
    for (const Link& l : graph.links()) {
      capacity_[static_cast<std::size_t>(l.id)] = l.capacity;
      fft_[static_cast<std::size_t>(l.id)] = l.free_flow_time;
    }
  }

  const Graph& graph() const noexcept { return *graph_; }
  std::size_t num_links() const noexcept { return capacity_.size(); }
  double capacity(int id) const { return capacity_[static_cast<std::size_t>(id)]; }
  double free_flow_time(int id) const { return fft_[static_cast<std::size_t>(id)]; }

  double cost(int id, double flow) const {
    const auto i = static_cast<std::size_t>(id);
    return link_cost(graph_->links()[i], flow, capacity_[i], fft_[i]);
  }

  double cost_integral(int id, double flow) const {
    const auto i = static_cast<std::size_t>(id);
    return link_cost_integral(graph_->links()[i], flow, capacity_[i], fft_[i]);
  }

  void set(int id, double capacity, double fft) {
    capacity_.at(static_cast<std::size_t>(id)) = capacity;
    fft_.at(static_cast<std::size_t>(id)) = fft;
  }

  void reset(int id) {
    const Link& l = graph_->link(id);
    set(id, l.capacity, l.free_flow_time);
  }

 private:
  const Graph* graph_;
  std::vector<double> capacity_;
  std::vector<double> fft_;
};

inline NetworkView apply_scenario(const Graph& graph, std::span<const ScenarioEdit> edits) {
  NetworkView view(graph);
  std::vector<char> seen(graph.num_links(), 0);
  for (const ScenarioEdit& e : edits) {
    if (e.link_id < 0 || static_cast<std::size_t>(e.link_id) >= graph.num_links())
      throw Error("scenario edit references unknown link " + std::to_string(e.link_id));
    if (seen[static_cast<std::size_t>(e.link_id)]++)
      throw Error("duplicate scenario edit for link " + std::to_string(e.link_id));
    if (!(e.capacity > 0.0)) throw Error("scenario edit capacity must be positive");
    view.set(e.link_id, e.capacity, e.free_flow_time);
  }
  return view;
}

inline void revert_scenario(NetworkView& view, std::span<const ScenarioEdit> edits) {
  for (const ScenarioEdit& e : edits) view.reset(e.link_id);
}

// Collapses edits from concurrent projects so each link appears once: the
// smallest capacity and the largest free-flow time win. Output sorted by link.
inline std::vector<ScenarioEdit> merge_edits(std::vector<ScenarioEdit> edits) {
  std::sort(edits.begin(), edits.end(),
            [](const ScenarioEdit& a, const ScenarioEdit& b) { return a.link_id < b.link_id; });
  std::vector<ScenarioEdit> out;
  for (const ScenarioEdit& e : edits) {
    if (!out.empty() && out.back().link_id == e.link_id) {
      out.back().capacity = std::min(out.back().capacity, e.capacity);
      out.back().free_flow_time = std::max(out.back().free_flow_time, e.free_flow_time);
    } else {
      out.push_back(e);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// TNTP I/O. Node ids are 1-based in files and 0-based in memory.

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Splits "<TAG> value" into (TAG, value). Returns false for non-tag lines.
inline bool parse_tag(const std::string& line, std::string& tag, std::string& value) {
  if (line.empty() || line[0] != '<') return false;
  const auto close = line.find('>');
  if (close == std::string::npos) return false;
  tag = line.substr(1, close - 1);
  value = trim(line.substr(close + 1));
  return true;
}

inline int parse_int_field(const std::string& v, int line_no, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (d != std::floor(d)) throw std::invalid_argument(v);
    return static_cast<int>(d);
  } catch (const std::exception&) {
    throw ParseError(line_no, "malformed header: bad value for " + what);
  }
}

inline double parse_double(const std::string& tok, int line_no) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return d;
  } catch (const std::exception&) {
    throw ParseError(line_no, "malformed number '" + tok + "'");
  }
}

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline Graph parse_tntp_net(std::istream& in) {
  int num_nodes = -1;
  int num_links = -1;
  int num_zones = -1;
  int first_thru = 1;
  bool end_of_metadata = false;
  std::vector<Link> links;
  std::string raw;
  int line_no = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = detail::trim(raw);
    if (!end_of_metadata) {
      if (line.empty()) continue;
      std::string tag, value;
      if (!detail::parse_tag(line, tag, value))
        throw ParseError(line_no, "malformed header: expected <TAG> line");
      if (tag == "NUMBER OF NODES") num_nodes = detail::parse_int_field(value, line_no, tag);
      else if (tag == "NUMBER OF LINKS") num_links = detail::parse_int_field(value, line_no, tag);
      else if (tag == "NUMBER OF ZONES") num_zones = detail::parse_int_field(value, line_no, tag);
      else if (tag == "FIRST THRU NODE") first_thru = detail::parse_int_field(value, line_no, tag);
      else if (tag == "END OF METADATA") {
        end_of_metadata = true;
        if (num_nodes < 0 || num_links < 0)
          throw ParseError(line_no, "malformed header: missing node or link count");
      }
      continue;
    }
    if (const auto c = line.find('~'); c != std::string::npos) line = detail::trim(line.substr(0, c));
    if (line.empty()) continue;
    if (const auto s = line.find(';'); s != std::string::npos) line = detail::trim(line.substr(0, s));

    std::istringstream ss(line);
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) tok.push_back(t);
    if (tok.size() < 5) throw ParseError(line_no, "link row needs at least 5 columns");

    auto field = [&](std::size_t i, double dflt) {
      return i < tok.size() ? detail::parse_double(tok[i], line_no) : dflt;
    };
    Link l;
    l.id = static_cast<int>(links.size());
    const double tail = field(0, 0), head = field(1, 0);
    if (tail < 1 || tail > num_nodes || head < 1 || head > num_nodes)
      throw ParseError(line_no, "node count mismatch: link endpoint outside 1.." + std::to_string(num_nodes));
    l.tail = static_cast<int>(tail) - 1;
    l.head = static_cast<int>(head) - 1;
    l.capacity = field(2, 0);
    l.length = field(3, 0);
    l.free_flow_time = field(4, 0);
    l.bpr_a = field(5, kDefaultBprA);
    l.bpr_b = field(6, kDefaultBprB);
    l.speed_limit = field(7, 0);
    l.toll = field(8, 0);
    l.link_type = static_cast<int>(field(9, 1));
    if (!(l.capacity > 0)) throw ParseError(line_no, "non-positive capacity");
    if (!(l.free_flow_time > 0)) throw ParseError(line_no, "non-positive free-flow time");
    if (l.bpr_a < 0 || l.bpr_b < 1) throw ParseError(line_no, "invalid BPR parameters");
    links.push_back(l);
  }
  if (!end_of_metadata) throw ParseError(line_no, "malformed header: missing <END OF METADATA>");
  if (static_cast<int>(links.size()) != num_links)
    throw ParseError(line_no, "link count mismatch: header says " + std::to_string(num_links) +
                                  ", found " + std::to_string(links.size()));
  return Graph(num_nodes, std::move(links), std::max(first_thru, 1) - 1, num_zones);
}

inline Graph parse_tntp_net(const std::string& text) {
  std::istringstream in(text);
  return parse_tntp_net(in);
}

inline std::string write_tntp_net(const Graph& g) {
  std::ostringstream out;
  out << "<NUMBER OF ZONES> " << g.num_zones() << "\n"
      << "<NUMBER OF NODES> " << g.num_nodes() << "\n"
      << "<FIRST THRU NODE> " << g.first_thru_node() + 1 << "\n"
      << "<NUMBER OF LINKS> " << g.num_links() << "\n"
      << "<END OF METADATA>\n\n"
      << "~\tinit\tterm\tcapacity\tlength\tfft\tb\tpower\tspeed\ttoll\ttype\t;\n";
  using detail::format_double;
  for (const Link& l : g.links()) {
    out << '\t' << l.tail + 1 << '\t' << l.head + 1 << '\t' << format_double(l.capacity) << '\t'
        << format_double(l.length) << '\t' << format_double(l.free_flow_time) << '\t'
        << format_double(l.bpr_a) << '\t' << format_double(l.bpr_b) << '\t'
        << format_double(l.speed_limit) << '\t' << format_double(l.toll) << '\t' << l.link_type
        << "\t;\n";
  }
  return out.str();
}

// Trips files: optional metadata, then `Origin n` blocks of `dest : flow;`
// entries. Zero demands and self pairs are dropped. When `num_nodes` is not
// given, the `<NUMBER OF ZONES>` tag (if any) bounds node ids.
inline DemandMatrix parse_tntp_trips(std::istream& in, std::optional<int> num_nodes = std::nullopt) {
  DemandMatrix dm;
  std::optional<int> bound = num_nodes;
  int origin = -1;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = detail::trim(raw);
    if (line.empty() || line[0] == '~') continue;
    std::string tag, value;
    if (detail::parse_tag(line, tag, value)) {
      if (tag == "NUMBER OF ZONES" && !num_nodes) bound = detail::parse_int_field(value, line_no, tag);
      continue;
    }
    if (line.rfind("Origin", 0) == 0) {
      const double o = detail::parse_double(detail::trim(line.substr(6)), line_no);
      if (o < 1 || (bound && o > *bound))
        throw ParseError(line_no, "origin block references unknown node " + detail::trim(line.substr(6)));
      origin = static_cast<int>(o) - 1;
      continue;
    }
    if (origin < 0) throw ParseError(line_no, "demand entry outside an Origin block");
    std::istringstream ss(line);
    std::string entry;
    while (std::getline(ss, entry, ';')) {
      entry = detail::trim(entry);
      if (entry.empty()) continue;
      const auto colon = entry.find(':');
      if (colon == std::string::npos) throw ParseError(line_no, "expected 'dest : flow'");
      const double d = detail::parse_double(detail::trim(entry.substr(0, colon)), line_no);
      const double flow = detail::parse_double(detail::trim(entry.substr(colon + 1)), line_no);
      if (d < 1 || (bound && d > *bound))
        throw ParseError(line_no, "demand entry references unknown node");
      if (flow < 0) throw ParseError(line_no, "negative demand");
      const int dest = static_cast<int>(d) - 1;
      if (dest == origin || flow == 0.0) continue;
      dm.set(origin, dest, dm.get(origin, dest) + flow);
    }
  }
  return dm;
}

inline DemandMatrix parse_tntp_trips(const std::string& text, std::optional<int> num_nodes = std::nullopt) {
  std::istringstream in(text);
  return parse_tntp_trips(in, num_nodes);
}

// ---------------------------------------------------------------------------
// Whole-network transforms used by instance variants.

inline Graph scale_capacity(const Graph& g, double factor) {
  std::vector<Link> links = g.links();
  for (Link& l : links) l.capacity *= factor;
  return Graph(g.num_nodes(), std::move(links), g.first_thru_node(), g.num_zones());
}

inline DemandMatrix scale_demand(const DemandMatrix& dm, double factor) {
  DemandMatrix out;
  for (const auto& [od, v] : dm.entries()) out.set(od.first, od.second, v * factor);
  return out;
}

// Removes links by (tail, head) and appends new links; ids are renumbered
// densely in the surviving order. Node ids here are 0-based.
inline Graph edit_topology(const Graph& g, std::span<const std::pair<int, int>> remove,
                           std::span<const Link> add) {
  std::vector<Link> links;
  for (const Link& l : g.links()) {
    const bool drop = std::any_of(remove.begin(), remove.end(), [&](const auto& r) {
      return r.first == l.tail && r.second == l.head;
    });
    if (!drop) links.push_back(l);
  }
  if (links.size() + remove.size() != g.num_links())
    throw Error("topology edit removes a link that does not exist");
  for (Link l : add) links.push_back(l);
  for (std::size_t i = 0; i < links.size(); ++i) links[i].id = static_cast<int>(i);
  return Graph(g.num_nodes(), std::move(links), g.first_thru_node(), g.num_zones());
}

}  // namespace renosched
