#pragma once

// Scenario cost estimators used to bound travel delay before simulating:
// the costliest-cached-subset heuristic and a gradient-boosted regression
// tree ensemble trained on pinball (quantile) loss.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "renosched/error.hpp"
#include "renosched/scenario.hpp"

namespace renosched {

// Largest cached stt over all cached subsets of `sc` (including `sc` itself
// and the empty scenario).
inline double heuristic_estimate(const Scenario& sc, const ScenarioCache& cache) {
  if (auto exact = cache.find(sc)) return *exact;
  double best = cache.base_stt();
  cache.for_each([&](const Scenario& s, double v) {
    if (v > best && s.is_subset_of(sc)) best = v;
  });
  return best;
}

inline double pinball_loss(double predicted, double actual, double q) {
  return actual >= predicted ? q * (actual - predicted) : (1.0 - q) * (predicted - actual);
}

struct BoostingParams {
  int num_trees = 200;
  int max_depth = 6;
  double learning_rate = 0.1;
  int min_samples_leaf = 5;
};

// Binary regression tree over scenario bits.
struct RegressionTree {
  struct Node {
    int feature = -1;  // -1 for leaves
    int left = -1;     // bit == 0
    int right = -1;    // bit == 1
    double value = 0.0;
  };
  std::vector<Node> nodes;

  double predict(const Scenario& sc) const {
    int i = 0;
    while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
      const Node& n = nodes[static_cast<std::size_t>(i)];
      i = sc.test(static_cast<std::size_t>(n.feature)) ? n.right : n.left;
    }
    return nodes[static_cast<std::size_t>(i)].value;
  }
};

struct QuantileModel {
  double quantile = 0.5;
  std::size_t num_features = 0;
  std::size_t training_size = 0;
  double base_score = 0.0;
  double learning_rate = 0.1;
  std::vector<RegressionTree> trees;
  // Mean training pinball loss after the initial constant and after each tree.
  std::vector<double> loss_history;

  double raw_predict(const Scenario& sc) const {
    double f = base_score;
    for (const RegressionTree& t : trees) f += learning_rate * t.predict(sc);
    return f;
  }
};

namespace detail {

// Smallest value v with at least a fraction q of samples <= v.
inline double quantile_of(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  const double pos = std::ceil(q * static_cast<double>(values.size())) - 1.0;
  const auto k = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(values.size() - 1)));
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k), values.end());
  return values[k];
}

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<std::uint8_t>& x, std::size_t num_features, const std::vector<double>& grad,
              const std::vector<double>& resid, double q, const BoostingParams& p)
      : x_(x), nf_(num_features), grad_(grad), resid_(resid), q_(q), p_(p) {}

  RegressionTree build(std::vector<std::size_t> rows) {
    RegressionTree tree;
    grow(tree, std::move(rows), 0);
    return tree;
  }

 private:
  int grow(RegressionTree& tree, std::vector<std::size_t> rows, int depth) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    const auto n = rows.size();
    const auto min_leaf = static_cast<std::size_t>(std::max(p_.min_samples_leaf, 1));

    int best_feature = -1;
    if (depth < p_.max_depth && n >= 2 * min_leaf) {
      double total = 0.0;
      for (auto r : rows) total += grad_[r];
      const double parent = total * total / static_cast<double>(n);
      std::vector<double> sum1(nf_, 0.0);
      std::vector<std::size_t> cnt1(nf_, 0);
      for (auto r : rows) {
        const std::uint8_t* row = &x_[r * nf_];
        for (std::size_t f = 0; f < nf_; ++f)
          if (row[f]) {
            sum1[f] += grad_[r];
            ++cnt1[f];
          }
      }
      double best_gain = 1e-12 * std::max(1.0, std::abs(parent));
      for (std::size_t f = 0; f < nf_; ++f) {
        const std::size_t c1 = cnt1[f], c0 = n - c1;
        if (c1 < min_leaf || c0 < min_leaf) continue;
        const double s1 = sum1[f], s0 = total - s1;
        const double gain = s1 * s1 / static_cast<double>(c1) + s0 * s0 / static_cast<double>(c0) - parent;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = static_cast<int>(f);
        }
      }
    }

    if (best_feature < 0) {
      std::vector<double> r;
      r.reserve(n);
      for (auto i : rows) r.push_back(resid_[i]);
      tree.nodes[static_cast<std::size_t>(id)].value = quantile_of(std::move(r), q_);
      return id;
    }

    std::vector<std::size_t> left, right;
    for (auto r : rows) (x_[r * nf_ + static_cast<std::size_t>(best_feature)] ? right : left).push_back(r);
    rows.clear();
    rows.shrink_to_fit();
    const int l = grow(tree, std::move(left), depth + 1);
    const int rr = grow(tree, std::move(right), depth + 1);
    auto& node = tree.nodes[static_cast<std::size_t>(id)];
    node.feature = best_feature;
    node.left = l;
    node.right = rr;
    return id;
  }

  const std::vector<std::uint8_t>& x_;
  std::size_t nf_;
  const std::vector<double>& grad_;
  const std::vector<double>& resid_;
  double q_;
  const BoostingParams& p_;
};

}  // namespace detail

inline constexpr std::size_t kMinTrainingSamples = 20;

// Stagewise boosting on pinball loss. Each tree is grown on the negative
// gradient (q above the current prediction, -(1-q) below, 0 on it) by squared-error
// splits; leaf values are the q-quantile of the residuals in the leaf, so the
// training loss never increases.
inline QuantileModel fit_quantile_model(const std::vector<std::pair<Scenario, double>>& samples, double q,
                                        const BoostingParams& params = {}) {
  if (!(q > 0.0 && q < 1.0)) throw Error("quantile must lie in (0,1)");
  if (samples.size() < kMinTrainingSamples)
    throw Error("quantile model needs at least " + std::to_string(kMinTrainingSamples) + " samples");

  const std::size_t n = samples.size();
  const std::size_t nf = samples.front().first.size();
  std::vector<std::uint8_t> x(n * nf);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (samples[i].first.size() != nf) throw Error("inconsistent scenario width in training data");
    if (!std::isfinite(samples[i].second)) throw Error("non-finite training target");
    for (std::size_t f = 0; f < nf; ++f) x[i * nf + f] = samples[i].first.test(f) ? 1 : 0;
    y[i] = samples[i].second;
  }

  QuantileModel m;
  m.quantile = q;
  m.num_features = nf;
  m.training_size = n;
  m.learning_rate = params.learning_rate;
  m.base_score = detail::quantile_of(y, q);

  std::vector<double> pred(n, m.base_score), grad(n), resid(n);
  auto mean_loss = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += pinball_loss(pred[i], y[i], q);
    return s / static_cast<double>(n);
  };
  m.loss_history.push_back(mean_loss());

  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  for (int t = 0; t < params.num_trees; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      resid[i] = y[i] - pred[i];
      grad[i] = resid[i] > 0.0 ? q : (resid[i] < 0.0 ? -(1.0 - q) : 0.0);
    }
    detail::TreeBuilder builder(x, nf, grad, resid, q, params);
    RegressionTree tree = builder.build(all);
    for (std::size_t i = 0; i < n; ++i) {
      int k = 0;
      while (tree.nodes[static_cast<std::size_t>(k)].feature >= 0) {
        const auto& nd = tree.nodes[static_cast<std::size_t>(k)];
        k = x[i * nf + static_cast<std::size_t>(nd.feature)] ? nd.right : nd.left;
      }
      pred[i] += params.learning_rate * tree.nodes[static_cast<std::size_t>(k)].value;
    }
    m.trees.push_back(std::move(tree));
    m.loss_history.push_back(mean_loss());
  }
  return m;
}

// Ensemble prediction floored at the empty-network travel time.
inline double predict(const QuantileModel& m, const Scenario& sc, double floor) {
  if (sc.size() != m.num_features) throw Error("scenario width does not match model");
  return std::max(m.raw_predict(sc), floor);
}

// ---------------------------------------------------------------------------
// Surrogates as seen by the evaluator.

class Surrogate {
 public:
  virtual ~Surrogate() = default;
  virtual double estimate(const Scenario& sc, const ScenarioCache& cache) const = 0;
  // Called at generation boundaries; may refit on the grown cache.
  virtual void update(const ScenarioCache&) {}
  virtual std::string name() const = 0;
};

class HeuristicSurrogate final : public Surrogate {
 public:
  double estimate(const Scenario& sc, const ScenarioCache& cache) const override {
    return heuristic_estimate(sc, cache);
  }
  std::string name() const override { return "heuristic"; }
};

// Quantile tree ensemble refit whenever at least `refit_every` new cache
// entries have accrued. Falls back to the heuristic until enough samples
// exist for a first fit.
class QuantileSurrogate final : public Surrogate {
 public:
  explicit QuantileSurrogate(double q, BoostingParams params = {}, std::size_t refit_every = 64)
      : q_(q), params_(params), refit_every_(refit_every) {}

  double estimate(const Scenario& sc, const ScenarioCache& cache) const override {
    if (!model_) return heuristic_estimate(sc, cache);
    return predict(*model_, sc, cache.base_stt());
  }

  void update(const ScenarioCache& cache) override {
    const std::size_t n = cache.size();
    if (n < kMinTrainingSamples) return;
    if (model_ && n < fitted_size_ + refit_every_) return;
    model_ = fit_quantile_model(cache.entries(), q_, params_);
    fitted_size_ = n;
    ++fits_;
  }

  std::string name() const override {
    char buf[32];
    std::snprintf(buf, sizeof buf, "q%02d", static_cast<int>(std::lround(q_ * 100)));
    return buf;
  }

  const std::optional<QuantileModel>& model() const noexcept { return model_; }
  int fits() const noexcept { return fits_; }

 private:
  double q_;
  BoostingParams params_;
  std::size_t refit_every_;
  std::optional<QuantileModel> model_;
  std::size_t fitted_size_ = 0;
  int fits_ = 0;
};

}  // namespace renosched
