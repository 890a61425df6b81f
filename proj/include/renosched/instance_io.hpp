#pragma once

// Instance JSON. Project fields use the model's symbol names (d_p, c_p, ...);
// the network is referenced by TNTP paths and rebuilt on load.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "renosched/error.hpp"
#include "renosched/instgen.hpp"
#include "renosched/upper.hpp"

namespace renosched {

using Json = nlohmann::ordered_json;

inline Json gen_config_json(const GenConfig& c) {
  return Json{{"seed", c.seed},
              {"variant", c.variant},
              {"horizon", c.horizon},
              {"duration_mean", c.duration_mean},
              {"max_duration", c.max_duration},
              {"budget_factor", c.budget_factor},
              {"max_simultaneous", c.max_simultaneous},
              {"capacity_scale", c.capacity_scale},
              {"demand_scale", c.demand_scale},
              {"topology", c.topology},
              {"unconstrained", c.unconstrained},
              {"tight", c.tight},
              {"project_count", c.project_count},
              {"cost_per_period", c.cost_per_period},
              {"failure_cost_range", {c.failure_cost_lo, c.failure_cost_hi}},
              {"trial_prob_range", {c.trial_prob_lo, c.trial_prob_hi}},
              {"successes_max", c.successes_max},
              {"extrapolation", c.extrapolation}};
}

inline Json instance_to_json(const Instance& inst, const Json& provenance = Json::object()) {
  Json projects = Json::array();
  for (const Project& p : inst.projects) {
    Json edits = Json::array();
    for (const ScenarioEdit& e : p.edits)
      edits.push_back({{"link", e.link_id}, {"capacity", e.capacity}, {"free_flow_time", e.free_flow_time}});
    projects.push_back({{"id", p.id},
                        {"d_p", p.duration},
                        {"c_p", p.cost},
                        {"w_p", p.failure_cost},
                        {"v_p", p.trial_prob},
                        {"k_p", p.allowed_successes},
                        {"l_p", p.hard_due},
                        {"edits", std::move(edits)}});
  }
  const NetworkSource& s = inst.source;
  Json out{{"horizon", inst.horizon},
           {"m", inst.max_simultaneous},
           {"b_t", inst.budget},
           {"extrapolation", inst.extrapolation},
           {"network",
            {{"net", s.net_path},
             {"trips", s.trips_path},
             {"capacity_scale", s.capacity_scale},
             {"demand_scale", s.demand_scale},
             {"topology", s.topology},
             {"topology_file", s.topology_file}}},
           {"work_sum", inst.work_sum()},
           {"projects", std::move(projects)}};
  if (!provenance.empty()) out["provenance"] = provenance;
  return out;
}

// Rebuilds the network from the referenced TNTP files (resolved against
// `base_dir` when relative and not found as given).
inline Instance instance_from_json(const Json& j, const std::filesystem::path& base_dir = {}) {
  try {
    Instance inst;
    inst.horizon = j.at("horizon").get<int>();
    inst.max_simultaneous = j.at("m").get<int>();
    inst.budget = j.at("b_t").get<std::vector<double>>();
    inst.extrapolation = j.value("extrapolation", 1.0);
    const Json& n = j.at("network");
    inst.source.net_path = n.at("net").get<std::string>();
    inst.source.trips_path = n.at("trips").get<std::string>();
    inst.source.capacity_scale = n.value("capacity_scale", 1.0);
    inst.source.demand_scale = n.value("demand_scale", 1.0);
    inst.source.topology = n.value("topology", std::string("base"));
    inst.source.topology_file = n.value("topology_file", std::string());
    for (const Json& pj : j.at("projects")) {
      Project p;
      p.id = pj.at("id").get<int>();
      p.duration = pj.at("d_p").get<int>();
      p.cost = pj.at("c_p").get<double>();
      p.failure_cost = pj.at("w_p").get<double>();
      p.trial_prob = pj.at("v_p").get<double>();
      p.allowed_successes = pj.at("k_p").get<int>();
      p.hard_due = pj.at("l_p").get<int>();
      for (const Json& e : pj.at("edits"))
        p.edits.push_back({e.at("link").get<int>(), e.at("capacity").get<double>(), e.at("free_flow_time").get<double>()});
      if (p.duration < 1) throw Error("project " + std::to_string(p.id) + ": d_p must be >= 1");
      if (!(p.trial_prob > 0.0 && p.trial_prob < 1.0)) throw Error("project " + std::to_string(p.id) + ": v_p outside (0,1)");
      if (p.allowed_successes < 0 || p.failure_cost < 0.0) throw Error("project " + std::to_string(p.id) + ": negative k_p or w_p");
      inst.projects.push_back(std::move(p));
    }
    if (inst.horizon < 1) throw Error("horizon must be >= 1");
    if (inst.max_simultaneous < 1) throw Error("m must be >= 1");
    if (inst.budget.size() != static_cast<std::size_t>(inst.horizon)) throw Error("b_t must have one entry per period");
    Network net = load_network(inst.source, base_dir);
    inst.graph = std::move(net.graph);
    inst.demand = std::move(net.demand);
    for (const Project& p : inst.projects)
      for (const ScenarioEdit& e : p.edits)
        if (e.link_id < 0 || static_cast<std::size_t>(e.link_id) >= inst.graph.num_links())
          throw Error("project " + std::to_string(p.id) + " edits unknown link " + std::to_string(e.link_id));
    return inst;
  } catch (const Json::exception& e) {
    throw Error(std::string("instance JSON: ") + e.what());
  }
}

inline Instance read_instance_file(const std::filesystem::path& path) {
  Json j;
  try {
    j = Json::parse(detail::read_file(path));
  } catch (const Json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
  return instance_from_json(j, path.parent_path());
}

}  // namespace renosched
