#pragma once

// Quality metrics for two-objective minimization fronts. All metrics expect
// points normalized to [0,1] per axis.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "renosched/error.hpp"

namespace renosched {

using Point2 = std::array<double, 2>;

struct NormalizationBounds {
  double ttd_lo = 0.0, ttd_hi = 1.0;
  double risk_lo = 0.0, risk_hi = 1.0;
};

inline constexpr Point2 kReferencePoint{1.1, 1.1};

struct NormalizedFront {
  std::vector<Point2> points;
  std::vector<bool> clamped;  // true where a coordinate fell outside the bounds
};

inline NormalizedFront normalize(std::span<const Point2> points, const NormalizationBounds& b) {
  if (!(b.ttd_hi > b.ttd_lo) || !(b.risk_hi > b.risk_lo)) throw Error("normalization bounds need hi > lo");
  NormalizedFront out;
  out.points.reserve(points.size());
  out.clamped.reserve(points.size());
  for (const Point2& p : points) {
    const double x = (p[0] - b.ttd_lo) / (b.ttd_hi - b.ttd_lo);
    const double y = (p[1] - b.risk_lo) / (b.risk_hi - b.risk_lo);
    const Point2 c{std::clamp(x, 0.0, 1.0), std::clamp(y, 0.0, 1.0)};
    out.clamped.push_back(c[0] != x || c[1] != y);
    out.points.push_back(c);
  }
  return out;
}

// Exact area dominated by `front` and bounded by `ref`. Points not strictly
// inside the reference box, and dominated points, contribute nothing.
inline double hypervolume2d(std::span<const Point2> front, Point2 ref = kReferencePoint) {
  std::vector<Point2> pts;
  for (const Point2& p : front)
    if (p[0] < ref[0] && p[1] < ref[1]) pts.push_back(p);
  if (pts.empty()) return 0.0;
  std::sort(pts.begin(), pts.end());
  // Staircase: keep points with strictly decreasing second objective.
  std::vector<Point2> stair;
  for (const Point2& p : pts)
    if (stair.empty() || p[1] < stair.back()[1]) stair.push_back(p);
  double hv = 0.0;
  for (std::size_t i = 0; i < stair.size(); ++i) {
    const double next_x = i + 1 < stair.size() ? stair[i + 1][0] : ref[0];
    hv += (next_x - stair[i][0]) * (ref[1] - stair[i][1]);
  }
  return hv;
}

// Distance between the best point on each objective.
inline double max_spread(std::span<const Point2> front) {
  if (front.size() < 2) return 0.0;
  auto by_x = std::min_element(front.begin(), front.end(), [](const Point2& a, const Point2& b) {
    return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
  });
  auto by_y = std::min_element(front.begin(), front.end(), [](const Point2& a, const Point2& b) {
    return a[1] < b[1] || (a[1] == b[1] && a[0] < b[0]);
  });
  return std::hypot((*by_x)[0] - (*by_y)[0], (*by_x)[1] - (*by_y)[1]);
}

inline double min_dist_to_origin(std::span<const Point2> front) {
  double best = std::numeric_limits<double>::infinity();
  for (const Point2& p : front) best = std::min(best, std::hypot(p[0], p[1]));
  return best;
}

struct FrontMetrics {
  double hypervolume = 0.0;
  double max_spread = 0.0;
  double min_dist = std::numeric_limits<double>::infinity();
  std::size_t pf_size = 0;
};

// Normalize, then compute every metric.
inline FrontMetrics front_metrics(std::span<const Point2> raw, const NormalizationBounds& b) {
  const NormalizedFront n = normalize(raw, b);
  return {hypervolume2d(n.points), max_spread(n.points), min_dist_to_origin(n.points), raw.size()};
}

}  // namespace renosched
