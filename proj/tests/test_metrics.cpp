#include <gtest/gtest.h>

#include <random>

#include "renosched/metrics.hpp"
#include "oracles.hpp"

using namespace renosched;

namespace {

std::vector<Point2> random_front(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> xs(static_cast<std::size_t>(n)), ys(static_cast<std::size_t>(n));
  for (auto& x : xs) x = u(rng);
  for (auto& y : ys) y = u(rng);
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end(), std::greater<>());
  std::vector<Point2> f;
  for (std::size_t i = 0; i < xs.size(); ++i) f.push_back({xs[i], ys[i]});
  return f;
}

}  // namespace

TEST(Hypervolume, Examples) {
  const std::vector<Point2> origin{{0, 0}};
  EXPECT_DOUBLE_EQ(hypervolume2d(origin, {1, 1}), 1.0);
  const std::vector<Point2> three{{0.2, 0.8}, {0.5, 0.5}, {0.8, 0.2}};
  EXPECT_NEAR(hypervolume2d(three, {1, 1}), 0.37, 1e-12);
  EXPECT_EQ(hypervolume2d({}), 0.0);
  const std::vector<Point2> outside{{1.2, 0.1}};
  EXPECT_EQ(hypervolume2d(outside), 0.0);
}

TEST(Hypervolume, MatchesMonteCarlo) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const auto front = random_front(rng, 2 + trial % 12);
    const double mc = rs_oracle::monte_carlo_hv(front, {1.1, 1.1}, 1000000, rng);
    const double hv = hypervolume2d(front);
    EXPECT_NEAR(hv, mc, 0.005 * hv);
  }
}

TEST(Hypervolume, MonotoneAndOrderInvariant) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    auto front = random_front(rng, 8);
    const double hv = hypervolume2d(front);
    std::shuffle(front.begin(), front.end(), rng);
    EXPECT_DOUBLE_EQ(hypervolume2d(front), hv);
    front.push_back({u(rng), u(rng)});
    EXPECT_GE(hypervolume2d(front), hv);
  }
}

TEST(Spread, Examples) {
  const std::vector<Point2> one{{0.3, 0.3}};
  EXPECT_EQ(max_spread(one), 0.0);
  std::vector<Point2> two{{0, 1}, {1, 0}};
  EXPECT_DOUBLE_EQ(max_spread(two), std::sqrt(2.0));
  two.push_back({0.4, 0.4});
  EXPECT_DOUBLE_EQ(max_spread(two), std::sqrt(2.0));
}

TEST(MinDist, Examples) {
  const std::vector<Point2> with_origin{{0, 0}, {1, 1}};
  EXPECT_EQ(min_dist_to_origin(with_origin), 0.0);
  const std::vector<Point2> pyth{{0.6, 0.8}};
  EXPECT_DOUBLE_EQ(min_dist_to_origin(pyth), 1.0);
  EXPECT_TRUE(std::isinf(min_dist_to_origin({})));
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto f = random_front(rng, 10);
    double best = 1e9;
    for (const auto& p : f) best = std::min(best, std::sqrt(p[0] * p[0] + p[1] * p[1]));
    EXPECT_DOUBLE_EQ(min_dist_to_origin(f), best);
  }
}

TEST(Normalize, MapsAndClamps) {
  const NormalizationBounds b{10, 20, 100, 300};
  const std::vector<Point2> pts{{10, 100}, {20, 300}, {15, 200}, {25, 50}};
  const auto n = normalize(pts, b);
  EXPECT_EQ(n.points[0], (Point2{0, 0}));
  EXPECT_EQ(n.points[1], (Point2{1, 1}));
  EXPECT_EQ(n.points[2], (Point2{0.5, 0.5}));
  EXPECT_EQ(n.points[3], (Point2{1, 0}));
  EXPECT_EQ(n.clamped, (std::vector<bool>{false, false, false, true}));
  EXPECT_THROW(normalize(pts, NormalizationBounds{1, 1, 0, 1}), Error);
}

TEST(FrontMetrics, NormalizeThenMeasure) {
  const NormalizationBounds b{0, 200, 0, 50};
  const std::vector<Point2> raw{{40, 40}, {100, 25}, {160, 10}};
  const auto m = front_metrics(raw, b);
  const std::vector<Point2> norm{{0.2, 0.8}, {0.5, 0.5}, {0.8, 0.2}};
  EXPECT_DOUBLE_EQ(m.hypervolume, hypervolume2d(norm));
  EXPECT_DOUBLE_EQ(m.max_spread, max_spread(norm));
  EXPECT_DOUBLE_EQ(m.min_dist, min_dist_to_origin(norm));
  EXPECT_EQ(m.pf_size, 3u);
}
