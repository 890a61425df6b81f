#pragma once

#include "renosched/scenario.hpp"
#include "renosched/tap.hpp"
#include "renosched/upper.hpp"

namespace renosched {

// Runs the lower-level assignment for one scenario of an instance.
class TrafficSimulator {
 public:
  TrafficSimulator(const Instance& inst, TapOptions opt = {}) : inst_(&inst), opt_(opt) {}

  TapResult solve(const Scenario& sc) const {
    const std::vector<ScenarioEdit> edits = scenario_edits(*inst_, sc);
    const NetworkView view = apply_scenario(inst_->graph, edits);
    return solve_ue(view, inst_->demand, opt_);
  }

  double operator()(const Scenario& sc) const { return solve(sc).system_travel_time; }

  SimulateFn as_function() const {
    return [self = *this](const Scenario& sc) { return self(sc); };
  }

 private:
  const Instance* inst_;
  TapOptions opt_;
};

}  // namespace renosched
