#pragma once

// Run-archive files: flat key = value config, history/front/trace CSVs, and a
// small SVG line-chart writer.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "renosched/error.hpp"
#include "renosched/evolve.hpp"
#include "renosched/metrics.hpp"
#include "renosched/network.hpp"
#include "renosched/plbe.hpp"

namespace renosched {

using KeyValues = std::map<std::string, std::string>;

// Strings are quoted; everything else is written verbatim.
inline void write_config(std::ostream& out, const KeyValues& kv) {
  for (const auto& [k, v] : kv) out << k << " = " << v << '\n';
}

inline std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

inline KeyValues read_config(std::istream& in) {
  KeyValues kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = detail::trim(line);
    if (line.empty() || line[0] == '#' || line[0] == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected key = value");
    std::string key = detail::trim(line.substr(0, eq));
    std::string val = detail::trim(line.substr(eq + 1));
    if (val.size() >= 2 && val.front() == '"' && val.back() == '"') {
      std::string un;
      for (std::size_t i = 1; i + 1 < val.size(); ++i) {
        if (val[i] == '\\' && i + 2 < val.size()) ++i;
        un += val[i];
      }
      val = un;
    }
    kv[key] = val;
  }
  return kv;
}

inline void put_bounds(KeyValues& kv, const NormalizationBounds& b) {
  kv["bounds.ttd_lo"] = detail::format_double(b.ttd_lo);
  kv["bounds.ttd_hi"] = detail::format_double(b.ttd_hi);
  kv["bounds.risk_lo"] = detail::format_double(b.risk_lo);
  kv["bounds.risk_hi"] = detail::format_double(b.risk_hi);
}

inline NormalizationBounds get_bounds(const KeyValues& kv) {
  auto num = [&](const std::string& k) {
    auto it = kv.find(k);
    if (it == kv.end()) throw Error("config lacks " + k);
    return detail::parse_double(it->second, 0);
  };
  return {num("bounds.ttd_lo"), num("bounds.ttd_hi"), num("bounds.risk_lo"), num("bounds.risk_hi")};
}

// ---------------------------------------------------------------------------
// CSVs.

inline constexpr const char* kHistoryHeader = "generation,hypervolume,min_dist,pf_size,unique_sims,wall_seconds";

inline void write_history_row(std::ostream& out, const GenerationSnapshot& s) {
  char wall[32];
  std::snprintf(wall, sizeof wall, "%.3f", s.wall_seconds);
  out << s.generation << ',' << detail::format_double(s.metrics.hypervolume) << ','
      << detail::format_double(s.metrics.min_dist) << ',' << s.metrics.pf_size << ',' << s.unique_sims << ','
      << wall << '\n';
}

struct HistoryRow {
  int generation = 0;
  double hypervolume = 0.0;
  double min_dist = 0.0;
  std::size_t pf_size = 0;
  long unique_sims = 0;
  double wall_seconds = 0.0;
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace detail

inline std::vector<HistoryRow> read_history(std::istream& in) {
  std::vector<HistoryRow> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || detail::trim(line).empty()) continue;
    const auto f = detail::split(line, ',');
    if (f.size() != 6) throw ParseError(line_no, "history row needs 6 fields");
    HistoryRow r;
    r.generation = static_cast<int>(detail::parse_double(f[0], line_no));
    r.hypervolume = detail::parse_double(f[1], line_no);
    r.min_dist = detail::parse_double(f[2], line_no);
    r.pf_size = static_cast<std::size_t>(detail::parse_double(f[3], line_no));
    r.unique_sims = static_cast<long>(detail::parse_double(f[4], line_no));
    r.wall_seconds = detail::parse_double(f[5], line_no);
    rows.push_back(r);
  }
  return rows;
}

inline std::string schedule_field(const Schedule& s) {
  std::string out;
  for (std::size_t i = 0; i < s.start.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(s.start[i]);
  }
  return out;
}

// Sorted by ttd then risk; full precision so metrics can be recomputed.
inline void write_front(std::ostream& out, const ParetoArchive& archive) {
  out << "ttd,risk,schedule\n";
  for (const auto& e : archive.sorted())
    out << detail::format_double(e.objectives.ttd) << ',' << detail::format_double(e.objectives.risk) << ','
        << schedule_field(e.schedule) << '\n';
}

inline std::vector<Point2> read_front(std::istream& in) {
  std::vector<Point2> pts;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || detail::trim(line).empty()) continue;
    const auto f = detail::split(line, ',');
    if (f.size() < 2) throw ParseError(line_no, "front row needs ttd,risk");
    pts.push_back({detail::parse_double(f[0], line_no), detail::parse_double(f[1], line_no)});
  }
  return pts;
}

inline constexpr const char* kTraceHeader = "generation,genotype_hash,sims_spent,status,ttd_or_estimate,risk";

inline void write_trace_row(std::ostream& out, const TraceRow& r) {
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(r.genotype_hash));
  out << r.generation << ',' << hash << ',' << r.sims_spent << ',' << to_string(r.status) << ','
      << detail::format_double(r.ttd_or_estimate) << ',' << detail::format_double(r.risk) << '\n';
}

// ---------------------------------------------------------------------------
// SVG.

struct Series {
  std::string label;
  std::vector<double> x, y;
};

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string tick_label(double v) {
  char buf[32];
  if (v != 0.0 && (std::abs(v) >= 1e5 || std::abs(v) < 1e-3)) std::snprintf(buf, sizeof buf, "%.2e", v);
  else std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

inline std::string svg_line_chart(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                                  const std::vector<Series>& series) {
  constexpr double W = 640, H = 400, L = 80, R = 20, T = 40, B = 50;
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const Series& s : series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax <= xmin) xmax = xmin + 1;
  if (ymax <= ymin) {
    const double pad = ymin == 0.0 ? 1.0 : std::abs(ymin) * 0.05;
    ymin -= pad;
    ymax += pad;
  }
  auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << detail::xml_escape(title)
    << "</text>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = xmin + (xmax - xmin) * k / 4.0, yv = ymin + (ymax - ymin) * k / 4.0;
    o << "<text x=\"" << detail::svg_num(px(xv)) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">"
      << detail::tick_label(xv) << "</text>\n";
    o << "<text x=\"" << L - 6 << "\" y=\"" << detail::svg_num(py(yv) + 4) << "\" text-anchor=\"end\">"
      << detail::tick_label(yv) << "</text>\n";
    o << "<line x1=\"" << L << "\" y1=\"" << detail::svg_num(py(yv)) << "\" x2=\"" << W - R << "\" y2=\""
      << detail::svg_num(py(yv)) << "\" stroke=\"#ddd\"/>\n";
  }
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">"
    << detail::xml_escape(xlabel) << "</text>\n";
  o << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << (T + H - B) / 2 << ")\">" << detail::xml_escape(ylabel) << "</text>\n";
  for (std::size_t si = 0; si < series.size(); ++si) {
    const Series& s = series[si];
    const char* color = colors[si % 6];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      o << (first ? "" : " ") << detail::svg_num(px(s.x[i])) << ',' << detail::svg_num(py(s.y[i]));
      first = false;
    }
    o << "\"/>\n";
    if (!s.label.empty())
      o << "<text x=\"" << W - R - 4 << "\" y=\"" << T + 14 * (si + 1) << "\" text-anchor=\"end\" fill=\"" << color
        << "\">" << detail::xml_escape(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

// One chart per history column against generation.
inline std::vector<std::pair<std::string, std::string>> history_charts(const std::vector<HistoryRow>& rows) {
  std::vector<double> g;
  for (const HistoryRow& r : rows) g.push_back(r.generation);
  auto column = [&](auto get) {
    std::vector<double> v;
    for (const HistoryRow& r : rows) v.push_back(get(r));
    return v;
  };
  std::vector<std::pair<std::string, std::string>> out;
  auto add = [&](const std::string& name, const std::string& label, std::vector<double> y) {
    out.emplace_back(name + ".svg", svg_line_chart(label + " by generation", "generation", label, {{"", g, std::move(y)}}));
  };
  add("hypervolume", "hypervolume", column([](const HistoryRow& r) { return r.hypervolume; }));
  add("min_dist", "min distance to origin", column([](const HistoryRow& r) { return r.min_dist; }));
  add("pf_size", "Pareto front size", column([](const HistoryRow& r) { return static_cast<double>(r.pf_size); }));
  add("unique_sims", "unique simulations", column([](const HistoryRow& r) { return static_cast<double>(r.unique_sims); }));
  add("wall_seconds", "wall seconds", column([](const HistoryRow& r) { return r.wall_seconds; }));
  return out;
}

}  // namespace renosched
