#include <gtest/gtest.h>

#include <random>

#include "colearn/learning_engine.hpp"
#include "colearn/oracle.hpp"
#include "test_support.hpp"

using namespace colearn;
using colearn::testing::table2Overlay;
using colearn::testing::table2PlanSets;
using colearn::testing::upperEnvelope;

namespace {

std::vector<RunState> runTable2(std::optional<ConstraintEnvelope> env, std::size_t iterations = 10) {
  const auto ps = table2PlanSets();
  RunConfig c;
  c.iterations = iterations;
  c.planEnv = std::move(env);
  return runRepetition(ps, table2Overlay(), c);
}

// Feasible optimum by enumeration, for the converged state.
OracleResult table2Oracle(const std::optional<ConstraintEnvelope>& env) {
  const auto ps = table2PlanSets();
  return bruteForceOracle(ps, {}, CostFunctionSpec::variance(), env ? &*env : nullptr);
}

void expectConvergedToFeasibleOptimum(const std::vector<RunState>& traj,
                                      const std::optional<ConstraintEnvelope>& env) {
  const auto r = table2Oracle(env);
  ASSERT_TRUE(r.feasibleOptimum.has_value());
  EXPECT_TRUE(traj.back().satisfied);
  EXPECT_EQ(traj.back().objective, *r.feasibleOptimum);
  EXPECT_EQ(traj.back().selections, r.feasibleSelections);
}

}  // namespace

// The first iteration reproduces the worked example's selections; later
// iterations may only improve on them.
TEST(WorkedExample, SoftConstraints) {
  const auto traj = runTable2(std::nullopt);
  EXPECT_EQ(traj.front().globalPlan.values, (std::vector<double>{10, 10}));
  EXPECT_EQ(traj.front().selections, (std::vector<std::size_t>{0, 0, 0}));
  EXPECT_TRUE(traj.front().satisfied);
  EXPECT_EQ(traj.back().objective, 0.0);
  EXPECT_EQ(traj.back().selections, traj.front().selections);
}

TEST(WorkedExample, UpperBoundOnFirstElement) {
  const auto env = upperEnvelope(9, std::nullopt);
  const auto traj = runTable2(env);
  EXPECT_EQ(traj.front().globalPlan.values, (std::vector<double>{6, 15}));
  EXPECT_EQ(traj.front().selections, (std::vector<std::size_t>{1, 0, 1}));
  EXPECT_TRUE(traj.front().satisfied);
  expectConvergedToFeasibleOptimum(traj, env);
  EXPECT_EQ(traj.back().globalPlan.values, (std::vector<double>{9, 12}));
}

TEST(WorkedExample, UpperBoundOnSecondElement) {
  const auto env = upperEnvelope(std::nullopt, 9);
  const auto traj = runTable2(env);
  EXPECT_EQ(traj.front().globalPlan.values, (std::vector<double>{14, 9}));
  EXPECT_EQ(traj.front().selections, (std::vector<std::size_t>{0, 1, 0}));
  EXPECT_TRUE(traj.front().satisfied);
  expectConvergedToFeasibleOptimum(traj, env);
}

TEST(WorkedExample, UpperBoundsOnBothElements) {
  const auto env = upperEnvelope(10, 13);
  const auto traj = runTable2(env);
  EXPECT_EQ(traj.front().globalPlan.values, (std::vector<double>{7, 13}));
  EXPECT_EQ(traj.front().selections, (std::vector<std::size_t>{0, 0, 1}));
  EXPECT_TRUE(traj.front().satisfied);
  expectConvergedToFeasibleOptimum(traj, env);
  EXPECT_EQ(traj.back().globalPlan.values, (std::vector<double>{10, 10}));
}

TEST(WorkedExample, UnsatisfiableBounds) {
  const auto traj = runTable2(upperEnvelope(9, 9));
  EXPECT_EQ(traj.front().globalPlan.values, (std::vector<double>{7, 13}));
  EXPECT_EQ(traj.front().selections, (std::vector<std::size_t>{0, 0, 1}));
  EXPECT_GT(traj.front().fallbackAgents, 0u);
  for (const auto& s : traj) EXPECT_FALSE(s.satisfied);
}

TEST(WorkedExample, UnsatisfiableUnderEveryTreeOrder) {
  // No combination meets [9,9], so no positioning can report satisfaction.
  const auto ps = table2PlanSets();
  const auto env = upperEnvelope(9, 9);
  EXPECT_EQ(bruteForceOracle(ps, {}, CostFunctionSpec::variance(), &env).feasibleCount(), 0u);
  std::vector<std::size_t> order{0, 1, 2};
  do {
    RunConfig c;
    c.iterations = 6;
    c.planEnv = env;
    for (const auto& s : runRepetition(ps, TreeOverlay(order, 2), c)) EXPECT_FALSE(s.satisfied);
  } while (std::next_permutation(order.begin(), order.end()));
}

TEST(WorkedExample, SatisfiableCasesHoldUnderEveryTreeOrder) {
  const auto ps = table2PlanSets();
  for (const auto& env : {upperEnvelope(9, std::nullopt), upperEnvelope(std::nullopt, 9),
                          upperEnvelope(10, 13)}) {
    std::vector<std::size_t> order{0, 1, 2};
    do {
      RunConfig c;
      c.iterations = 8;
      c.planEnv = env;
      const auto final = runRepetition(ps, TreeOverlay(order, 2), c).back();
      EXPECT_TRUE(final.satisfied);
    } while (std::next_permutation(order.begin(), order.end()));
  }
}

TEST(CandidateGlobal, AddsSubtreeAndRemainder) {
  const std::vector<double> plan{1, 2}, sub{10, 20}, prevG{100, 200}, prevOwn{30, 40};
  EXPECT_EQ(candidateGlobal(plan, sub).values, (std::vector<double>{11, 22}));
  EXPECT_EQ(candidateGlobal(plan, sub, Remainder{prevG, prevOwn}).values,
            (std::vector<double>{81, 182}));
  EXPECT_EQ(candidateGlobal(plan, {}).values, plan);
  const std::vector<double> bad{1, 2, 3};
  EXPECT_THROW(candidateGlobal(plan, bad), DimensionError);
}

TEST(EstimateCosts, MomentsMatchDirectComputation) {
  const std::vector<double> g{7, 13};
  const auto c = estimateCosts(g, 2 + 2 + 4, 4 + 4 + 16, 3, CostFunctionSpec::variance());
  EXPECT_EQ(c.inefficiency, 9.0);
  EXPECT_DOUBLE_EQ(c.meanDiscomfort, 8.0 / 3.0);
  EXPECT_NEAR(c.unfairness, populationVariance(std::vector<double>{2, 2, 4}), 1e-12);
  EXPECT_GE(estimateCosts(g, 0.1, 0.01 - 1e-18, 1, {}).unfairness, 0.0);
}

TEST(SelectPlan, MinimisesEstimatedObjective) {
  const auto ps = table2PlanSets();
  Aggregate base(2);
  base.add(ps[0][0]);
  base.add(ps[1][0]);  // [4,8]
  const BehaviorWeights w;
  const auto spec = CostFunctionSpec::variance();
  std::vector<double> scratch;
  SelectionContext ctx{2, true, &base, &w, &spec, nullptr, nullptr};
  const auto choice = selectPlan(ps[2], ctx, scratch);
  EXPECT_EQ(choice.planIndex, 0u);  // [10,10]
  EXPECT_EQ(choice.objective, 0.0);
  EXPECT_TRUE(choice.feasible);
  EXPECT_FALSE(choice.fallback);
}

TEST(SelectPlan, FiltersByEnvelopeAndFallsBack) {
  const auto ps = table2PlanSets();
  Aggregate base(2);
  base.add(ps[0][0]);
  base.add(ps[1][0]);
  const BehaviorWeights w;
  const auto spec = CostFunctionSpec::variance();
  std::vector<double> scratch;
  const auto env = upperEnvelope(9, std::nullopt);
  SelectionContext ctx{2, true, &base, &w, &spec, &env, nullptr};
  EXPECT_EQ(selectPlan(ps[2], ctx, scratch).planIndex, 1u);  // [7,13]

  const auto impossible = upperEnvelope(1, 1);
  ctx.planEnv = &impossible;
  const auto choice = selectPlan(ps[2], ctx, scratch);
  EXPECT_TRUE(choice.fallback);
  EXPECT_FALSE(choice.feasible);
  // Both overshoot by 18 and expect the same; [10,10] has the lower objective.
  EXPECT_EQ(choice.planIndex, 0u);

  // In the first iteration ties fall to lower discomfort.
  ctx.iteration = 1;
  EXPECT_EQ(selectPlan(ps[2], ctx, scratch).planIndex, 1u);
}

TEST(SelectPlan, FallbackMovesTowardEnvelope) {
  const PlanSet ps{0, {{{9}, 0}, {{6}, 1}, {{7}, 2}}};
  Aggregate base(1);
  const BehaviorWeights w;
  const auto spec = CostFunctionSpec::variance();
  std::vector<double> scratch;
  const auto env = ConstraintEnvelope::uniform(1, 0.0, 5.0);
  SelectionContext ctx{3, true, &base, &w, &spec, &env, nullptr};
  const auto choice = selectPlan(ps, ctx, scratch);
  EXPECT_TRUE(choice.fallback);
  EXPECT_EQ(choice.planIndex, 1u);
}

TEST(SelectPlan, ColdStartBelowRootChecksOnlyUpperBounds) {
  const PlanSet ps{0, {{{5}, 0}, {{1}, 1}}};
  Aggregate base(1);
  const BehaviorWeights w;
  const auto spec = CostFunctionSpec::variance();
  std::vector<double> scratch;
  ConstraintEnvelope env(1);
  env.setLower(0, 3.0);
  SelectionContext ctx{1, false, &base, &w, &spec, &env, nullptr};
  // Lower bounds can still be met by agents outside the subtree, so both
  // plans survive and the one with the larger expectation (5 - 3) wins.
  auto choice = selectPlan(ps, ctx, scratch);
  EXPECT_EQ(choice.planIndex, 0u);
  EXPECT_FALSE(choice.fallback);
  env.setUpper(0, 4.0);
  // [5] now exceeds the upper bound.
  choice = selectPlan(ps, ctx, scratch);
  EXPECT_EQ(choice.planIndex, 1u);
  EXPECT_FALSE(choice.fallback);
}

TEST(CollectiveLearner, RejectsInconsistentConfiguration) {
  const auto ps = table2PlanSets();
  RunConfig c;
  EXPECT_THROW(CollectiveLearner(ps, TreeOverlay({0, 1}, 2), c), ConfigError);
  c.planEnv = ConstraintEnvelope(3);
  EXPECT_THROW(CollectiveLearner(ps, table2Overlay(), c), DimensionError);
  c = RunConfig{};
  c.agentWeights = {{0, 0}};
  EXPECT_THROW(CollectiveLearner(ps, table2Overlay(), c), ConfigError);
  c = RunConfig{};
  c.iterations = 0;
  EXPECT_THROW(CollectiveLearner(ps, table2Overlay(), c), ConfigError);
  c = RunConfig{};
  EXPECT_THROW(CollectiveLearner(ps, TreeOverlay({2, 0, 1}, 9), c), ConfigError);
  c.costSpec = CostFunctionSpec::rmse({1, 2, 3});
  EXPECT_THROW(CollectiveLearner(ps, table2Overlay(), c), DimensionError);
}

TEST(CollectiveLearner, PerAgentWeightsAverageIntoSystemObjective) {
  RunConfig c;
  c.agentWeights = {{0.2, 0.2}, {0.4, 0.0}, {0.0, 0.6}};
  const auto w = c.systemWeights();
  EXPECT_DOUBLE_EQ(w.alpha, 0.2);
  EXPECT_DOUBLE_EQ(w.beta, 0.8 / 3.0);
  const auto ps = table2PlanSets();
  const auto traj = runRepetition(ps, table2Overlay(), c);
  const auto& s = traj.back();
  EXPECT_DOUBLE_EQ(s.objective, weightedObjective(s.costs, w));
}

TEST(CollectiveLearner, SingleAgentFindsItsBestPlan) {
  const std::vector<PlanSet> ps{{0, {{{1, 5}, 0}, {{3, 3}, 0.5}, {{2, 6}, 0.1}}}};
  RunConfig c;
  c.iterations = 3;
  const auto s = runRepetition(ps, c).back();
  EXPECT_EQ(s.selections[0], 1u);
  EXPECT_EQ(s.objective, 0.0);
}

TEST(CollectiveLearner, ObjectiveNeverIncreasesAndSatisfactionIsKept) {
  std::mt19937_64 rng(2024);
  for (int rep = 0; rep < 200; ++rep) {
    const auto inst = colearn::testing::randomInstance(rng, 20, 5, 6);
    const auto traj = runRepetition(inst.planSets, inst.config);
    ASSERT_EQ(traj.size(), inst.config.iterations);
    bool seen = false;
    for (std::size_t t = 0; t < traj.size(); ++t) {
      EXPECT_EQ(traj[t].iteration, t + 1);
      if (t > 0) {
        EXPECT_LE(traj[t].objective, traj[t - 1].objective);
      }
      if (seen) {
        EXPECT_TRUE(traj[t].satisfied);
      }
      seen = seen || traj[t].satisfied;
    }
  }
}

TEST(CollectiveLearner, ReportedStateIsExact) {
  std::mt19937_64 rng(99);
  for (int rep = 0; rep < 50; ++rep) {
    const auto inst = colearn::testing::randomInstance(rng, 15, 4, 5);
    const auto s = runRepetition(inst.planSets, inst.config).back();
    const auto g = aggregateSelected(s.selections, inst.planSets);
    EXPECT_EQ(s.globalPlan, g);
    const auto costs = evaluateCosts(g, s.selections, inst.planSets, inst.config.costSpec);
    EXPECT_EQ(s.costs, costs);
    bool ok = true;
    if (inst.config.planEnv) ok = ok && satisfiesPlanEnvelope(g, *inst.config.planEnv);
    if (inst.config.costEnv) ok = ok && satisfiesCostEnvelope(costs, *inst.config.costEnv);
    EXPECT_EQ(s.satisfied, ok);
  }
}

TEST(CollectiveLearner, DeterministicForFixedSeed) {
  std::mt19937_64 rng(1);
  const auto inst = colearn::testing::randomInstance(rng, 30, 6, 8);
  const auto a = runRepetition(inst.planSets, inst.config);
  const auto b = runRepetition(inst.planSets, inst.config);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t t = 0; t < a.size(); ++t) {
    EXPECT_EQ(a[t].selections, b[t].selections);
    EXPECT_EQ(a[t].objective, b[t].objective);
  }
}
