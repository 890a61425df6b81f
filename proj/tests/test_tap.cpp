#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "renosched/tap.hpp"
#include "support.hpp"

using namespace renosched;

namespace {

std::vector<double> free_costs(const Graph& g) {
  std::vector<double> c;
  for (const Link& l : g.links()) c.push_back(l.free_flow_time);
  return c;
}

}  // namespace

TEST(ShortestPath, SingleLink) {
  const Graph g(2, {rs_test::make_link(0, 0, 1, 10, 10)});
  const auto t = shortest_path_tree(g, std::vector<double>{10.0}, 0);
  EXPECT_EQ(t.dist[1], 10.0);
  EXPECT_EQ(t.pred_link[1], 0);
  EXPECT_EQ(t.pred_link[0], -1);
}

TEST(ShortestPath, Triangle) {
  const Graph g(3, {rs_test::make_link(0, 0, 1, 1, 5), rs_test::make_link(1, 1, 2, 1, 5),
                    rs_test::make_link(2, 0, 2, 1, 11)});
  const auto t = shortest_path_tree(g, std::vector<double>{5, 5, 11}, 0);
  EXPECT_EQ(t.dist[2], 10.0);
  EXPECT_EQ(t.pred_link[2], 1);
}

TEST(ShortestPath, MatchesBellmanFordOnRandomGraphs) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 50;
    std::vector<Link> links;
    std::uniform_int_distribution<int> node(0, n - 1);
    std::uniform_real_distribution<double> c(0.5, 20.0);
    for (int i = 0; i < 250; ++i) {
      const int a = node(rng), b = node(rng);
      if (a == b) continue;
      links.push_back(rs_test::make_link(static_cast<int>(links.size()), a, b, 100, c(rng)));
    }
    const Graph g(n, std::move(links));
    const auto costs = free_costs(g);
    for (int o = 0; o < n; o += 7) {
      std::vector<double> dist;
      std::vector<int> pred;
      rs_oracle::bellman_ford(g, costs, o, dist, pred);
      const auto t = shortest_path_tree(g, costs, o);
      for (int v = 0; v < n; ++v) {
        if (std::isinf(dist[static_cast<std::size_t>(v)])) {
          EXPECT_TRUE(std::isinf(t.dist[static_cast<std::size_t>(v)]));
          EXPECT_EQ(t.pred_link[static_cast<std::size_t>(v)], -1);
        } else {
          EXPECT_NEAR(t.dist[static_cast<std::size_t>(v)], dist[static_cast<std::size_t>(v)], 1e-9);
        }
      }
    }
  }
}

TEST(ShortestPath, TieGoesToSmallestLinkId) {
  const Graph g = rs_test::parallel_links({5, 5, 5});
  const auto t = shortest_path_tree(g, std::vector<double>{5, 5, 5}, 0);
  EXPECT_EQ(t.pred_link[1], 0);
}

TEST(AllOrNothing, Examples) {
  const Graph g = rs_test::parallel_links({10, 12});
  DemandMatrix dm;
  dm.set(0, 1, 100);
  const NetworkView v(g);
  const auto f = all_or_nothing(v, std::vector<double>{10, 12}, dm);
  EXPECT_EQ(f, (FlowPattern{100, 0}));

  const Graph chain(3, {rs_test::make_link(0, 0, 1, 1, 1), rs_test::make_link(1, 1, 2, 1, 1)});
  DemandMatrix d2;
  d2.set(0, 2, 40);
  EXPECT_EQ(all_or_nothing(NetworkView(chain), std::vector<double>{1, 1}, d2), (FlowPattern{40, 40}));
}

TEST(AllOrNothing, UnreachableNamesPair) {
  const Graph g(3, {rs_test::make_link(0, 0, 1, 1, 1)});
  DemandMatrix dm;
  dm.set(0, 2, 5);
  try {
    all_or_nothing(NetworkView(g), std::vector<double>{1}, dm);
    FAIL();
  } catch (const UnreachableError& e) {
    EXPECT_EQ(e.origin(), 0);
    EXPECT_EQ(e.destination(), 2);
  }
}

TEST(AllOrNothing, SiouxFallsFreeFlowMatchesShortestDistances) {
  const auto& net = rs_test::sioux_falls();
  const auto costs = free_costs(net.graph);
  const auto f = all_or_nothing(NetworkView(net.graph), costs, net.demand);
  double loaded = 0.0, oracle = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    EXPECT_GE(f[i], 0.0);
    loaded += f[i] * costs[i];
  }
  std::vector<double> dist;
  std::vector<int> pred;
  for (const auto& [od, d] : net.demand.entries()) {
    rs_oracle::bellman_ford(net.graph, costs, od.first, dist, pred);
    oracle += d * dist[static_cast<std::size_t>(od.second)];
  }
  EXPECT_NEAR(loaded, oracle, 1e-9 * oracle);
  // Flow leaving each node in excess of flow entering equals its net demand.
  std::vector<double> net_out(24, 0.0);
  for (const Link& l : net.graph.links()) {
    net_out[static_cast<std::size_t>(l.tail)] += f[static_cast<std::size_t>(l.id)];
    net_out[static_cast<std::size_t>(l.head)] -= f[static_cast<std::size_t>(l.id)];
  }
  for (const auto& [od, d] : net.demand.entries()) {
    net_out[static_cast<std::size_t>(od.first)] -= d;
    net_out[static_cast<std::size_t>(od.second)] += d;
  }
  for (double x : net_out) EXPECT_NEAR(x, 0.0, 1e-6);
}

TEST(LineSearch, Examples) {
  const Graph g = rs_test::parallel_links({10, 10});
  const NetworkView v(g);
  EXPECT_EQ(line_search(v, {100, 0}, {100, 0}), 0.0);
  EXPECT_NEAR(line_search(v, {100, 0}, {0, 100}), 0.5, 1e-9);
  const Graph one(2, {rs_test::make_link(0, 0, 1, 100, 10)});
  EXPECT_EQ(line_search(NetworkView(one), {70}, {70}), 0.0);
}

TEST(SolveUe, SingleLinkConvergesInOneIteration) {
  const Graph g(2, {rs_test::make_link(0, 0, 1, 100, 10)});
  DemandMatrix dm;
  dm.set(0, 1, 80);
  const TapResult r = solve_ue(NetworkView(g), dm);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_EQ(r.flows[0], 80.0);
}

TEST(SolveUe, IdenticalParallelLinksSplitEvenly) {
  const Graph g = rs_test::parallel_links({10, 10});
  DemandMatrix dm;
  dm.set(0, 1, 300);
  const TapResult r = solve_ue(NetworkView(g), dm);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.flows[0], 150.0, 150.0 * 1e-4);
  EXPECT_NEAR(r.flows[1], 150.0, 150.0 * 1e-4);
  EXPECT_NEAR(r.link_costs[0], r.link_costs[1], 1e-6);
  EXPECT_NEAR(r.system_travel_time, 2 * 150.0 * link_cost(g.link(0), 150.0), 1e-3);
}

TEST(SolveUe, ParallelLinksAnalytic) {
  // Linear BPR: r1(1 + a x1/s1) = r2(1 + a x2/s2), x1 + x2 = d.
  const double r1 = 10, s1 = 100, r2 = 15, s2 = 200, a = 0.15, d = 900;
  const Graph g(2, {rs_test::make_link(0, 0, 1, s1, r1, a, 1.0), rs_test::make_link(1, 0, 1, s2, r2, a, 1.0)});
  DemandMatrix dm;
  dm.set(0, 1, d);
  const double x1 = (r2 - r1 + r2 * a * d / s2) / (r1 * a / s1 + r2 * a / s2);
  const TapResult r = solve_ue(NetworkView(g), dm);
  EXPECT_NEAR(r.flows[0], x1, 5e-5);
  EXPECT_NEAR(r.flows[1], d - x1, 5e-5);
  EXPECT_NEAR(r.link_costs[0], r.link_costs[1], 1e-4 * std::min(r.link_costs[0], r.link_costs[1]));
}

TEST(SolveUe, WardropOnTwoRoutes) {
  const Graph g(3, {rs_test::make_link(0, 0, 1, 200, 4), rs_test::make_link(1, 1, 2, 300, 3),
                    rs_test::make_link(2, 0, 2, 250, 9)});
  DemandMatrix dm;
  dm.set(0, 2, 700);
  const TapOptions opt;
  const TapResult r = solve_ue(NetworkView(g), dm, opt);
  ASSERT_TRUE(r.converged);
  const double via = r.link_costs[0] + r.link_costs[1];
  const double direct = r.link_costs[2];
  EXPECT_LE(std::abs(via - direct), opt.tol * std::min(via, direct));
}

TEST(SolveUe, SystemTravelTimeExamples) {
  const Graph g(2, {rs_test::make_link(0, 0, 1, 100, 10, 0.0)});
  DemandMatrix dm;
  dm.set(0, 1, 100);
  EXPECT_NEAR(solve_ue(NetworkView(g), dm).system_travel_time, 1000.0, 1e-9);
  EXPECT_EQ(solve_ue(NetworkView(g), DemandMatrix{}).system_travel_time, 0.0);
}

TEST(SolveUe, SiouxFallsMatchesMsa) {
  const auto& net = rs_test::sioux_falls();
  const TapResult r = solve_ue(NetworkView(net.graph), net.demand, {1e-4, 4000, false});
  ASSERT_TRUE(r.converged);
  const auto oracle = rs_oracle::msa(net.graph, net.demand, 5000);
  for (std::size_t i = 0; i < oracle.size(); ++i) {
    if (oracle[i] <= 100.0) continue;
    EXPECT_NEAR(r.flows[i], oracle[i], 0.01 * oracle[i]) << "link " << i;
  }
  double stt = 0.0;
  for (std::size_t i = 0; i < r.flows.size(); ++i) stt += r.flows[i] * r.link_costs[i];
  EXPECT_NEAR(r.system_travel_time, stt, 1e-9 * stt);
}

TEST(SolveUe, ObjectiveNonIncreasingAndGapNonNegative) {
  const auto& net = rs_test::sioux_falls();
  const TapResult r = solve_ue(NetworkView(net.graph), net.demand, {1e-4, 4000, true});
  ASSERT_EQ(r.gap_history.size(), static_cast<std::size_t>(r.iterations));
  for (double g : r.gap_history) EXPECT_GE(g, 0.0);
  for (std::size_t k = 1; k < r.objective_history.size(); ++k)
    EXPECT_LE(r.objective_history[k], r.objective_history[k - 1] * (1 + 1e-12));
}

TEST(SolveUe, Deterministic) {
  const auto& net = rs_test::sioux_falls();
  const TapResult a = solve_ue(NetworkView(net.graph), net.demand);
  const TapResult b = solve_ue(NetworkView(net.graph), net.demand);
  EXPECT_EQ(a.flows, b.flows);
  EXPECT_EQ(a.system_travel_time, b.system_travel_time);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(SolveUe, InvariantToFreeFlowScaling) {
  const auto& net = rs_test::sioux_falls();
  std::vector<Link> links = net.graph.links();
  for (Link& l : links) l.free_flow_time *= 2.0;
  const Graph scaled(net.graph.num_nodes(), links, net.graph.first_thru_node(), net.graph.num_zones());
  const TapOptions opt;
  const TapResult a = solve_ue(NetworkView(net.graph), net.demand, opt);
  const TapResult b = solve_ue(NetworkView(scaled), net.demand, opt);
  for (std::size_t i = 0; i < a.flows.size(); ++i)
    EXPECT_NEAR(a.flows[i], b.flows[i], 2 * opt.tol * std::max(1.0, a.flows[i]));
}

TEST(SolveUe, ClosureRaisesTravelTime) {
  const auto& net = rs_test::sioux_falls();
  const TapResult base = solve_ue(NetworkView(net.graph), net.demand);
  const std::vector<ScenarioEdit> e{closure_edit(net.graph.link(15))};
  const TapResult closed = solve_ue(apply_scenario(net.graph, e), net.demand);
  EXPECT_GT(closed.system_travel_time, base.system_travel_time);
  EXPECT_LT(closed.flows[15], 1.0);
}

TEST(SolveUe, RejectsBadOptions) {
  const Graph g = rs_test::parallel_links({1, 2});
  EXPECT_THROW(solve_ue(NetworkView(g), DemandMatrix{}, {0.0, 10, false}), Error);
  EXPECT_THROW(solve_ue(NetworkView(g), DemandMatrix{}, {1e-4, 0, false}), Error);
}
