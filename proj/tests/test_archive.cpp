#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "renosched/archive.hpp"

using namespace renosched;

TEST(Config, RoundTripsQuotedAndBareValues) {
  KeyValues kv;
  kv["instance"] = quoted("runs/a \"b\"\\c.json");
  kv["seed"] = "42";
  kv["budget.seconds"] = "-1";
  std::ostringstream out;
  write_config(out, kv);
  std::istringstream in(out.str());
  const KeyValues back = read_config(in);
  EXPECT_EQ(back.at("instance"), "runs/a \"b\"\\c.json");
  EXPECT_EQ(back.at("seed"), "42");
  EXPECT_EQ(back.at("budget.seconds"), "-1");
  EXPECT_EQ(back.size(), 3u);
}

TEST(Config, SkipsCommentsAndSections) {
  std::istringstream in("# comment\n[run]\n\n  seed =  7  \nname = \"x\"\n");
  const KeyValues kv = read_config(in);
  EXPECT_EQ(kv.size(), 2u);
  EXPECT_EQ(kv.at("seed"), "7");
  EXPECT_EQ(kv.at("name"), "x");
}

TEST(Config, RejectsLineWithoutEquals) {
  std::istringstream in("seed = 1\nbroken\n");
  try {
    read_config(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
}

TEST(Config, BoundsRoundTripBitwise) {
  const NormalizationBounds b{0.0, 123456.789012345678, 1e-300, 0.1 + 0.2};
  KeyValues kv;
  put_bounds(kv, b);
  std::ostringstream out;
  write_config(out, kv);
  std::istringstream in(out.str());
  const NormalizationBounds r = get_bounds(read_config(in));
  EXPECT_EQ(r.ttd_lo, b.ttd_lo);
  EXPECT_EQ(r.ttd_hi, b.ttd_hi);
  EXPECT_EQ(r.risk_lo, b.risk_lo);
  EXPECT_EQ(r.risk_hi, b.risk_hi);
}

TEST(Config, MissingBoundsThrow) {
  KeyValues kv;
  kv["bounds.ttd_lo"] = "0";
  EXPECT_THROW(get_bounds(kv), Error);
}

TEST(History, HeaderAndRoundTrip) {
  EXPECT_STREQ(kHistoryHeader, "generation,hypervolume,min_dist,pf_size,unique_sims,wall_seconds");
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::ostringstream out;
  out << kHistoryHeader << '\n';
  std::vector<GenerationSnapshot> snaps;
  for (int g = 0; g < 20; ++g) {
    GenerationSnapshot s;
    s.generation = g;
    s.metrics.hypervolume = u(rng);
    s.metrics.min_dist = u(rng);
    s.metrics.pf_size = static_cast<std::size_t>(g % 7);
    s.unique_sims = 10 * g;
    s.wall_seconds = 0.5 * g;
    write_history_row(out, s);
    snaps.push_back(s);
  }
  std::istringstream in(out.str());
  const auto rows = read_history(in);
  ASSERT_EQ(rows.size(), snaps.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].generation, snaps[i].generation);
    EXPECT_EQ(rows[i].hypervolume, snaps[i].metrics.hypervolume);
    EXPECT_EQ(rows[i].min_dist, snaps[i].metrics.min_dist);
    EXPECT_EQ(rows[i].pf_size, snaps[i].metrics.pf_size);
    EXPECT_EQ(rows[i].unique_sims, snaps[i].unique_sims);
    EXPECT_NEAR(rows[i].wall_seconds, snaps[i].wall_seconds, 1e-3);
  }
}

TEST(History, RejectsShortRow) {
  std::istringstream in(std::string(kHistoryHeader) + "\n0,1,2,3,4\n");
  EXPECT_THROW(read_history(in), ParseError);
}

TEST(Front, SortedNonDominatedRows) {
  ParetoArchive a;
  a.insert(Schedule{{3, 1}}, {5.0, 1.0});
  a.insert(Schedule{{0, 0}}, {1.0, 9.0});
  a.insert(Schedule{{2, 2}}, {3.0, 3.0});
  a.insert(Schedule{{4, 4}}, {4.0, 4.0});
  std::ostringstream out;
  write_front(out, a);
  EXPECT_EQ(out.str(), "ttd,risk,schedule\n1,9,0 0\n3,3,2 2\n5,1,3 1\n");
  std::istringstream in(out.str());
  const auto pts = read_front(in);
  ASSERT_EQ(pts.size(), 3u);
  EXPECT_EQ(pts[1][0], 3.0);
  EXPECT_EQ(pts[1][1], 3.0);
}

TEST(Front, FullPrecision) {
  ParetoArchive a;
  a.insert(Schedule{{0}}, {1.0 / 3.0, 2.0 / 7.0});
  std::ostringstream out;
  write_front(out, a);
  std::istringstream in(out.str());
  const auto pts = read_front(in);
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_EQ(pts[0][0], 1.0 / 3.0);
  EXPECT_EQ(pts[0][1], 2.0 / 7.0);
}

TEST(Trace, RowFormat) {
  EXPECT_STREQ(kTraceHeader, "generation,genotype_hash,sims_spent,status,ttd_or_estimate,risk");
  TraceRow r;
  r.generation = 4;
  r.genotype_hash = 0xabcull;
  r.sims_spent = 2;
  r.status = EvalStatus::Pruned;
  r.ttd_or_estimate = 12.5;
  r.risk = 0.25;
  std::ostringstream out;
  write_trace_row(out, r);
  EXPECT_EQ(out.str(), "4,0000000000000abc,2,pruned,12.5,0.25\n");
}

TEST(Svg, LineChartIsWellFormed) {
  const std::string svg = svg_line_chart("a < b & c", "x", "y", {{"s", {0, 1, 2}, {1, 4, 2}}});
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("a &lt; b &amp; c"), std::string::npos);
  EXPECT_NE(svg.find("<polyline"), std::string::npos);
}

TEST(Svg, EmptyAndConstantSeries) {
  EXPECT_NO_THROW(svg_line_chart("t", "x", "y", {}));
  const std::string flat = svg_line_chart("t", "x", "y", {{"", {0, 1}, {2, 2}}});
  EXPECT_EQ(flat.find("nan"), std::string::npos);
  EXPECT_EQ(flat.find("inf"), std::string::npos);
}

TEST(Svg, XmlEscape) {
  EXPECT_EQ(detail::xml_escape("<a href=\"x\">&</a>"), "&lt;a href=&quot;x&quot;&gt;&amp;&lt;/a&gt;");
}

TEST(Svg, HistoryChartsOnePerColumn) {
  std::vector<HistoryRow> rows(3);
  for (int i = 0; i < 3; ++i) rows[static_cast<std::size_t>(i)] = {i, 0.1 * i, 1.0 - 0.1 * i, static_cast<std::size_t>(i), 5L * i, 0.2 * i};
  const auto charts = history_charts(rows);
  ASSERT_EQ(charts.size(), 5u);
  const std::vector<std::string> names{"hypervolume.svg", "min_dist.svg", "pf_size.svg", "unique_sims.svg",
                                       "wall_seconds.svg"};
  for (std::size_t i = 0; i < charts.size(); ++i) {
    EXPECT_EQ(charts[i].first, names[i]);
    EXPECT_EQ(charts[i].second.rfind("<svg", 0), 0u);
  }
}
