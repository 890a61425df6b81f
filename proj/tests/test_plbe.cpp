#include <gtest/gtest.h>

#include "renosched/evolve.hpp"
#include "renosched/plbe.hpp"
#include "renosched/simulator.hpp"
#include "support.hpp"

using namespace renosched;

namespace {

// Superset-monotone stand-in for the traffic model.
double synthetic_stt(const Scenario& s) {
  double v = 5000.0;
  for (int p : s.projects()) v += 40.0 + 7.0 * p;
  const double c = static_cast<double>(s.count());
  return v + 15.0 * c * c;
}

Individual exact_parent(Objectives o) {
  Individual ind;
  ind.objectives = o;
  ind.status = EvalStatus::Exact;
  return ind;
}

std::unique_ptr<Evaluator> plbe(const Instance& inst, ScenarioCache& cache, SimulateFn sim, PlbeVariant v,
                                std::unique_ptr<Surrogate> sur) {
  return std::make_unique<Evaluator>(inst, cache, std::move(sim), EvaluatorConfig{EvaluatorKind::Plbe, v, 1},
                                     std::move(sur));
}

std::vector<Objectives> front_of(const ParetoArchive& a) {
  std::vector<Objectives> out;
  for (const auto& e : a.sorted()) out.push_back(e.objectives);
  return out;
}

}  // namespace

TEST(IsDominated, Examples) {
  EXPECT_FALSE(is_dominated({5, 5}, {}));
  const std::vector<Objectives> others{{4, 4}};
  EXPECT_TRUE(is_dominated({5, 5}, others));
  const std::vector<Objectives> same{{5, 5}};
  EXPECT_FALSE(is_dominated({5, 5}, same));
}

TEST(SelectNextScenario, Examples) {
  const std::vector<std::pair<Scenario, int>> freq{{Scenario::from_bitstring("110"), 3},
                                                   {Scenario::from_bitstring("001"), 1}};
  EXPECT_EQ(select_next_scenario(freq), 0u);
  const std::vector<std::pair<Scenario, int>> card{{Scenario::from_bitstring("111"), 2},
                                                   {Scenario::from_bitstring("010"), 2}};
  EXPECT_EQ(select_next_scenario(card), 1u);
  const std::vector<std::pair<Scenario, int>> lex{{Scenario::from_bitstring("010"), 2},
                                                  {Scenario::from_bitstring("100"), 2}};
  EXPECT_EQ(select_next_scenario(lex), 0u);
  const std::vector<std::pair<Scenario, int>> one{{Scenario::from_bitstring("101"), 4}};
  EXPECT_EQ(select_next_scenario(one), 0u);
  EXPECT_THROW(select_next_scenario({}), Error);
}

TEST(EstimateTtd, Examples) {
  const Instance inst = rs_test::toy_instance(6, 12, 2);
  Rng rng(1);
  const HeuristicSurrogate h;
  for (int i = 0; i < 50; ++i) {
    const Schedule s = random_schedule(inst, rng);
    ScenarioCache cache(6);
    cache.insert(Scenario(6), synthetic_stt(Scenario(6)));
    EXPECT_EQ(estimate_ttd_lb(inst, s, cache, h), 0.0);
    std::vector<double> seen;
    auto scen = scenarios_of(inst, s);
    for (const auto& [sc, _] : scen) {
      seen.push_back(estimate_ttd_lb(inst, s, cache, h));
      cache.insert(sc, synthetic_stt(sc));
    }
    seen.push_back(estimate_ttd_lb(inst, s, cache, h));
    for (std::size_t k = 1; k < seen.size(); ++k) EXPECT_GE(seen[k], seen[k - 1]);
    EXPECT_EQ(seen.back(), ttd(inst, s, cache));
  }
}

TEST(EstimateTtd, HeuristicIsLowerBoundForMonotoneCosts) {
  const Instance inst = rs_test::toy_instance(8, 16, 5, 3.0, 4);
  Rng rng(3);
  ScenarioCache cache(8);
  cache.insert(Scenario(8), synthetic_stt(Scenario(8)));
  const HeuristicSurrogate h;
  for (int i = 0; i < 200; ++i) {
    const Schedule s = random_schedule(inst, rng);
    ScenarioCache full = cache;
    for (const auto& [sc, _] : scenarios_of(inst, s))
      if (!full.contains(sc)) full.insert(sc, synthetic_stt(sc));
    EXPECT_LE(estimate_ttd_lb(inst, s, cache, h), ttd(inst, s, full) + 1e-9);
    if (i % 3 == 0) cache = full;
  }
}

TEST(Evaluator, NeedsSurrogateForPlbe) {
  const Instance inst = rs_test::toy_instance(3, 12, 1);
  ScenarioCache cache(3);
  EXPECT_THROW(Evaluator(inst, cache, synthetic_stt, EvaluatorConfig{EvaluatorKind::Plbe}), Error);
  Evaluator std_eval(inst, cache, synthetic_stt, EvaluatorConfig{});
  EXPECT_EQ(std_eval.total_sims(), 1);
  EXPECT_TRUE(cache.has_base());
}

TEST(Evaluator, PrecachedPlbeMatchesStandard) {
  const Instance inst = rs_test::toy_instance(6, 12, 3);
  Rng rng(8);
  std::vector<Schedule> kids;
  for (int i = 0; i < 30; ++i) kids.push_back(random_schedule(inst, rng));
  ScenarioCache cache(6);
  Evaluator standard(inst, cache, synthetic_stt, EvaluatorConfig{});
  const auto a = standard.evaluate_exact(kids);
  auto p = plbe(inst, cache, synthetic_stt, PlbeVariant::EliminationPruning, std::make_unique<HeuristicSurrogate>());
  const auto b = p->evaluate({}, kids);
  EXPECT_EQ(p->total_sims(), 0);
  for (std::size_t i = 0; i < kids.size(); ++i) {
    EXPECT_EQ(b[i].individual.status, EvalStatus::Exact);
    EXPECT_EQ(*b[i].individual.objectives, *a[i].individual.objectives);
    EXPECT_EQ(b[i].sims_spent, 0);
  }
}

TEST(Evaluator, DominatedAtFirstCheckIsPrunedForFree) {
  const Instance inst = rs_test::toy_instance(6, 12, 3);
  Rng rng(2);
  Schedule kid = random_schedule(inst, rng);
  while (risk(inst, kid) == 0.0) kid = random_schedule(inst, rng);
  for (auto variant : {PlbeVariant::EliminationPruning, PlbeVariant::LazyEvaluation}) {
    ScenarioCache cache(6);
    auto p = plbe(inst, cache, synthetic_stt, variant, std::make_unique<HeuristicSurrogate>());
    const std::vector<Individual> parents{exact_parent({0.0, 0.0})};
    const std::vector<Schedule> kids{kid};
    auto out = p->evaluate(parents, kids);
    EXPECT_EQ(out[0].individual.status, EvalStatus::Pruned);
    EXPECT_EQ(out[0].sims_spent, 0);
    EXPECT_EQ(out[0].individual.objectives->risk, risk(inst, kid));
    EXPECT_EQ(p->marked_count(), variant == PlbeVariant::EliminationPruning ? 1u : 0u);
    // A marked genotype stays pruned even without a dominating parent.
    out = p->evaluate({}, kids);
    EXPECT_EQ(out[0].individual.status,
              variant == PlbeVariant::EliminationPruning ? EvalStatus::Pruned : EvalStatus::Exact);
  }
}

TEST(Evaluator, SimsSpentSumsToCacheInsertions) {
  const Instance inst = rs_test::toy_instance(6, 12, 4);
  for (auto kind : {EvaluatorKind::Standard, EvaluatorKind::Plbe}) {
    ScenarioCache cache(6);
    std::unique_ptr<Surrogate> sur;
    if (kind == EvaluatorKind::Plbe) sur = std::make_unique<HeuristicSurrogate>();
    Evaluator ev(inst, cache, TrafficSimulator(inst).as_function(), EvaluatorConfig{kind}, std::move(sur));
    long spent = 0;
    ev.set_trace([&](const TraceRow& r) { spent += r.sims_spent; });
    EvolveConfig cfg;
    cfg.population = 20;
    cfg.max_generations = 10;
    const RunResult r = evolve_run(inst, ev, cfg);
    ASSERT_FALSE(r.error);
    EXPECT_EQ(spent + 1, static_cast<long>(cache.size()));
    EXPECT_EQ(ev.total_sims(), static_cast<long>(cache.size()));
  }
}

TEST(Evaluator, ParallelBatchMatchesSerial) {
  const Instance inst = rs_test::toy_instance(8, 16, 4, 3.0, 4);
  Rng rng(6);
  std::vector<Schedule> kids;
  for (int i = 0; i < 40; ++i) kids.push_back(random_schedule(inst, rng));
  ScenarioCache c1(8), c4(8);
  const auto sim = TrafficSimulator(inst).as_function();
  Evaluator serial(inst, c1, sim, EvaluatorConfig{EvaluatorKind::Standard, PlbeVariant::EliminationPruning, 1});
  Evaluator threaded(inst, c4, sim, EvaluatorConfig{EvaluatorKind::Standard, PlbeVariant::EliminationPruning, 4});
  const auto a = serial.evaluate_exact(kids);
  const auto b = threaded.evaluate_exact(kids);
  for (std::size_t i = 0; i < kids.size(); ++i) {
    EXPECT_EQ(*a[i].individual.objectives, *b[i].individual.objectives);
    EXPECT_EQ(a[i].sims_spent, b[i].sims_spent);
  }
  EXPECT_EQ(c1.entries(), c4.entries());
}

TEST(Plbe, SafeUnderLowerBoundSurrogate) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Instance inst = rs_test::toy_instance(6, 12, seed);
    const auto sim = TrafficSimulator(inst).as_function();
    ScenarioCache cache(6);
    auto ev = plbe(inst, cache, sim, PlbeVariant::LazyEvaluation,
                   std::make_unique<rs_test::OracleSurrogate>(sim, 0.5, seed));
    std::vector<Objectives> exact;
    std::vector<Schedule> pruned;
    EvolveHooks hooks;
    hooks.on_evaluated = [&](const Individual& ind) {
      if (ind.status == EvalStatus::Exact) exact.push_back(*ind.objectives);
      else pruned.push_back(ind.schedule);
    };
    EvolveConfig cfg;
    cfg.population = 20;
    cfg.max_generations = 15;
    cfg.seed = seed;
    const RunResult r = evolve_run(inst, *ev, cfg, hooks);
    ASSERT_FALSE(r.error);
    EXPECT_GT(pruned.size(), 0u);
    ScenarioCache truth(6);
    truth.insert(Scenario(6), sim(Scenario(6)));
    for (const Schedule& s : pruned) {
      for (const auto& [sc, _] : scenarios_of(inst, s))
        if (!truth.contains(sc)) truth.insert(sc, sim(sc));
      const Objectives o{ttd(inst, s, truth), risk(inst, s)};
      EXPECT_TRUE(is_dominated(o, exact)) << "seed " << seed;
    }
  }
}

TEST(Plbe, ExactOracleGivesStandardFront) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Instance inst = rs_test::two_project_instance(seed);
    const auto sim = TrafficSimulator(inst).as_function();
    EvolveConfig cfg;
    cfg.population = 20;
    cfg.max_generations = 30;
    cfg.seed = seed;
    ScenarioCache c0(2);
    Evaluator standard(inst, c0, sim, EvaluatorConfig{});
    const auto want = front_of(evolve_run(inst, standard, cfg).archive);
    for (auto variant : {PlbeVariant::EliminationPruning, PlbeVariant::LazyEvaluation}) {
      ScenarioCache c1(2);
      auto ev = plbe(inst, c1, sim, variant, std::make_unique<rs_test::OracleSurrogate>(sim, 0.0, seed));
      EXPECT_EQ(front_of(evolve_run(inst, *ev, cfg).archive), want);
    }
  }
}
