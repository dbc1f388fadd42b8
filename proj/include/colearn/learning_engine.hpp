#pragma once

// Iterative collective learning over a tree overlay.
//
// Every iteration has a bottom-up and a top-down phase. Bottom-up, each agent
// (children before parents) sees the aggregate of its subtree and, from the
// second iteration on, the remainder of the previous global plan outside its
// subtree. It jointly decides which child branches to accept (new choice vs
// previous choice) and which of its own plans to select. Top-down, the
// decisions are enacted: a rejected branch reverts to its previous
// selections. The root then confirms the exact result; a state that does not
// lower the objective, or that would break hard constraints already
// satisfied, is rolled back as a whole.
//
// Under hard constraints, plans whose estimated global plan or cost triple
// violate the envelopes are filtered out. In the first iteration no agent
// knows the full aggregate, so agents pick the plan with the highest
// expected satisfaction instead.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "colearn/error.hpp"
#include "colearn/hard_constraints.hpp"
#include "colearn/plan_model.hpp"
#include "colearn/tree_overlay.hpp"

namespace colearn {

struct RunConfig {
  std::size_t iterations = 40;
  BehaviorWeights weights;
  // Per-agent weights; when non-empty they override `weights` for agent
  // decisions and their mean weighs the system objective.
  std::vector<BehaviorWeights> agentWeights;
  CostFunctionSpec costSpec;
  std::optional<ConstraintEnvelope> planEnv;
  std::optional<CostEnvelope> costEnv;
  std::uint64_t seed = 0;
  std::size_t arity = 2;

  static constexpr std::size_t kMaxArity = 8;

  const BehaviorWeights& weightsOf(std::size_t agent) const {
    return agentWeights.empty() ? weights : agentWeights[agent];
  }

  BehaviorWeights systemWeights() const {
    if (agentWeights.empty()) return weights;
    BehaviorWeights mean;
    for (const auto& w : agentWeights) {
      mean.alpha += w.alpha;
      mean.beta += w.beta;
    }
    mean.alpha /= static_cast<double>(agentWeights.size());
    mean.beta /= static_cast<double>(agentWeights.size());
    return mean;
  }

  bool hasPlanEnvelope() const { return planEnv && planEnv->isActive(); }
  bool hasCostEnvelope() const { return costEnv && costEnv->isActive(); }
  bool constrained() const { return hasPlanEnvelope() || hasCostEnvelope(); }

  void validate(std::size_t numAgents, std::size_t m) const {
    if (iterations < 1) throw ConfigError("iterations must be at least 1");
    if (arity < 1 || arity > kMaxArity)
      throw ConfigError("tree arity must lie in [1," + std::to_string(kMaxArity) + "]");
    weights.validate();
    if (!agentWeights.empty() && agentWeights.size() != numAgents)
      throw ConfigError("per-agent weights must cover every agent");
    for (const auto& w : agentWeights) w.validate();
    costSpec.validate();
    if (costSpec.target && costSpec.target->size() != m)
      throw DimensionError("RMSE target has " + std::to_string(costSpec.target->size()) +
                           " elements, plans have " + std::to_string(m));
    if (planEnv && planEnv->dimension() != m)
      throw DimensionError("constraint envelope has " + std::to_string(planEnv->dimension()) +
                           " elements, plans have " + std::to_string(m));
  }
};

struct RunState {
  std::size_t iteration = 0;  // 1-based
  std::vector<std::size_t> selections;  // plan index per agent id
  GlobalPlan globalPlan;
  CostTriple costs;
  bool satisfied = true;
  double objective = 0.0;
  // Agents that found no envelope-feasible option in this iteration's
  // bottom-up pass and fell back to expected satisfaction.
  std::size_t fallbackAgents = 0;
};

// Partial sum of selected plans over a set of agents, with the first two
// moments of their discomfort scores.
struct Aggregate {
  std::vector<double> values;
  double discomfortSum = 0.0;
  double discomfortSqSum = 0.0;
  std::size_t count = 0;

  Aggregate() = default;
  explicit Aggregate(std::size_t m) : values(m, 0.0) {}

  void clear() {
    std::fill(values.begin(), values.end(), 0.0);
    discomfortSum = discomfortSqSum = 0.0;
    count = 0;
  }
  void add(const Plan& p) {
    for (std::size_t u = 0; u < values.size(); ++u) values[u] += p.values[u];
    discomfortSum += p.discomfort;
    discomfortSqSum += p.discomfort * p.discomfort;
    ++count;
  }
  void add(const Aggregate& o) {
    for (std::size_t u = 0; u < values.size(); ++u) values[u] += o.values[u];
    discomfortSum += o.discomfortSum;
    discomfortSqSum += o.discomfortSqSum;
    count += o.count;
  }
  void subtract(const Aggregate& o) {
    for (std::size_t u = 0; u < values.size(); ++u) values[u] -= o.values[u];
    discomfortSum -= o.discomfortSum;
    discomfortSqSum -= o.discomfortSqSum;
    count -= o.count;
  }
};

struct Remainder {
  std::span<const double> previousGlobal;
  std::span<const double> previousOwnSubtree;
};

// The global plan an agent expects if it selects `plan`: its subtree's
// aggregate, the plan itself and, after the first iteration, the part of the
// previous global plan contributed by agents outside its subtree.
inline GlobalPlan candidateGlobal(std::span<const double> plan,
                                  std::span<const double> subtreeAggregate,
                                  std::optional<Remainder> remainder = std::nullopt) {
  const auto m = plan.size();
  auto check = [m](std::span<const double> v) {
    if (!v.empty() && v.size() != m) throw DimensionError("aggregate dimension mismatch");
  };
  check(subtreeAggregate);
  GlobalPlan g{std::vector<double>(plan.begin(), plan.end())};
  if (!subtreeAggregate.empty())
    for (std::size_t u = 0; u < m; ++u) g.values[u] += subtreeAggregate[u];
  if (remainder) {
    check(remainder->previousGlobal);
    check(remainder->previousOwnSubtree);
    for (std::size_t u = 0; u < m; ++u)
      g.values[u] += remainder->previousGlobal[u] - remainder->previousOwnSubtree[u];
  }
  return g;
}

// Costs of `base + plan` as seen by the deciding agent.
inline CostTriple estimateCosts(std::span<const double> candidate, double discomfortSum,
                                double discomfortSqSum, std::size_t count,
                                const CostFunctionSpec& spec) {
  CostTriple c;
  c.inefficiency = inefficiencyCost(candidate, spec);
  if (count > 0) {
    const double n = static_cast<double>(count);
    c.meanDiscomfort = discomfortSum / n;
    c.unfairness = std::max(0.0, discomfortSqSum / n - c.meanDiscomfort * c.meanDiscomfort);
  }
  return c;
}

struct SelectionContext {
  std::size_t iteration = 1;
  // The root's subtree is the whole population, so its view is exact even
  // in the first iteration.
  bool atRoot = false;
  // Everything the agent knows except its own plan.
  const Aggregate* base = nullptr;
  const BehaviorWeights* weights = nullptr;
  const CostFunctionSpec* costSpec = nullptr;
  const ConstraintEnvelope* planEnv = nullptr;  // null or inactive: unconstrained
  const CostEnvelope* costEnv = nullptr;
};

struct PlanChoice {
  std::size_t planIndex = 0;
  double objective = 0.0;  // estimated, with the agent's weights
  bool feasible = true;    // estimated envelope feasibility
  bool fallback = false;   // no feasible plan; chosen by expected satisfaction
};

// Chooses one agent's plan given its context. Reuses `scratch` (size m).
//
// First iteration under constraints: among the plans the agent cannot rule
// out, the one with the highest expected satisfaction. Below the root only
// upper bounds on the global plan can be ruled out from a subtree sum.
// Otherwise: the lowest estimated objective among plans whose estimated
// global plan and costs satisfy the envelopes. With nothing feasible the
// agent falls back to expected satisfaction over all of its plans.
inline PlanChoice selectPlan(const PlanSet& planSet, const SelectionContext& ctx,
                             std::vector<double>& scratch) {
  const Aggregate& base = *ctx.base;
  const auto m = base.values.size();
  scratch.resize(m);
  const bool planBounded = ctx.planEnv && ctx.planEnv->isActive();
  const bool costBounded = ctx.costEnv && ctx.costEnv->isActive();
  const bool coldStart = ctx.iteration == 1 && (planBounded || costBounded);
  const bool partialView = ctx.iteration == 1 && !ctx.atRoot;
  const std::size_t k = planSet.size();

  std::vector<CostTriple> estimates(k);
  std::vector<double> objectives(k);
  std::vector<double> violations(k, 0.0);
  std::vector<std::size_t> feasible;
  feasible.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    const Plan& p = planSet[j];
    for (std::size_t u = 0; u < m; ++u) scratch[u] = base.values[u] + p.values[u];
    estimates[j] =
        estimateCosts(scratch, base.discomfortSum + p.discomfort,
                      base.discomfortSqSum + p.discomfort * p.discomfort, base.count + 1,
                      *ctx.costSpec);
    objectives[j] = weightedObjective(estimates[j], *ctx.weights);
    bool ok = true;
    if (partialView) {
      ok = !planBounded || satisfiesUpperBounds(scratch, *ctx.planEnv);
    } else {
      if (planBounded) violations[j] += planViolation(scratch, *ctx.planEnv);
      if (costBounded) violations[j] += costViolation(estimates[j], *ctx.costEnv);
      ok = (!planBounded || satisfiesPlanEnvelope(scratch, *ctx.planEnv)) &&
           (!costBounded || satisfiesCostEnvelope(estimates[j], *ctx.costEnv));
    }
    if (ok) feasible.push_back(j);
  }

  // After the first iteration the estimated objective settles ties, which
  // keeps learning alive when expected satisfaction cannot tell plans apart
  // (elements bounded on both sides).
  auto byExpectation = [&](std::span<const std::size_t> candidates, bool fallback) {
    const std::size_t j = selectByExpectedSatisfaction(
        planSet, candidates, planBounded ? *ctx.planEnv : ConstraintEnvelope{},
        costBounded ? *ctx.costEnv : CostEnvelope{}, estimates,
        ctx.iteration > 1 ? std::span<const double>(objectives) : std::span<const double>{});
    return PlanChoice{j, objectives[j], !fallback, fallback};
  };

  if (feasible.empty()) {
    // With a full view, move toward the envelope: only the plans with the
    // smallest estimated violation stay candidates.
    std::vector<std::size_t> closest;
    double least = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) {
      const double v = partialView ? 0.0 : violations[j];
      if (v < least) {
        least = v;
        closest.clear();
      }
      if (v == least) closest.push_back(j);
    }
    if (ctx.iteration == 1) {
      closest.resize(k);
      for (std::size_t j = 0; j < k; ++j) closest[j] = j;
    }
    return byExpectation(closest, true);
  }
  if (coldStart) return byExpectation(feasible, false);

  std::size_t best = feasible.front();
  for (const std::size_t j : feasible)
    if (objectives[j] < objectives[best]) best = j;
  return {best, objectives[best], true, false};
}

class CollectiveLearner {
 public:
  CollectiveLearner(std::span<const PlanSet> planSets, const TreeOverlay& overlay,
                    const RunConfig& config)
      : planSets_(planSets), overlay_(overlay), config_(config) {
    m_ = validatePlanSets(planSets_);
    if (overlay_.size() != planSets_.size())
      throw ConfigError("tree overlay covers " + std::to_string(overlay_.size()) +
                        " agents, plan sets cover " + std::to_string(planSets_.size()));
    if (overlay_.arity() > RunConfig::kMaxArity) throw ConfigError("tree arity too large");
    config_.validate(planSets_.size(), m_);
    if (config_.hasPlanEnvelope()) planEnv_ = &*config_.planEnv;
    if (config_.hasCostEnvelope()) costEnv_ = &*config_.costEnv;
    systemWeights_ = config_.systemWeights();
  }

  CollectiveLearner(const CollectiveLearner&) = delete;
  CollectiveLearner& operator=(const CollectiveLearner&) = delete;

  std::size_t dimension() const { return m_; }

  // One bottom-up + top-down pass. `previous` is null for the cold start.
  RunState runIteration(const RunState* previous) const {
    const std::size_t n = planSets_.size();
    const std::size_t t = previous ? previous->iteration + 1 : 1;

    std::vector<Aggregate> prevSub;
    if (previous) prevSub = subtreeAggregates(previous->selections);

    std::vector<Aggregate> newSub(n, Aggregate(m_));
    std::vector<std::size_t> tentative(n);
    std::vector<unsigned> acceptMask(n, ~0u);
    std::vector<double> scratch(m_);
    Aggregate base(m_);
    std::size_t fallbacks = 0;

    for (std::size_t pos = n; pos-- > 0;) {
      const std::size_t agent = overlay_.agentAt(pos);
      const std::size_t c0 = overlay_.firstChild(pos);
      const std::size_t c1 = overlay_.endChild(pos);
      SelectionContext ctx{t,        pos == 0, &base,   &config_.weightsOf(agent),
                           &config_.costSpec, planEnv_, costEnv_};

      if (!previous) {
        base.clear();
        for (std::size_t c = c0; c < c1; ++c) base.add(newSub[c]);
        const PlanChoice choice = selectPlan(planSets_[agent], ctx, scratch);
        fallbacks += choice.fallback;
        tentative[agent] = choice.planIndex;
        newSub[pos] = base;
        newSub[pos].add(planSets_[agent][choice.planIndex]);
        continue;
      }

      Aggregate remainder = prevSub.front();
      remainder.subtract(prevSub[pos]);

      std::optional<PlanChoice> best;
      unsigned bestMask = 0;
      const unsigned masks = 1u << (c1 - c0);
      for (unsigned mask = 0; mask < masks; ++mask) {
        base = remainder;
        for (std::size_t c = c0; c < c1; ++c)
          base.add((mask >> (c - c0)) & 1u ? newSub[c] : prevSub[c]);
        const PlanChoice choice = selectPlan(planSets_[agent], ctx, scratch);
        if (!best || better(choice, *best)) {
          best = choice;
          bestMask = mask;
        }
      }
      fallbacks += best->fallback;
      tentative[agent] = best->planIndex;
      acceptMask[pos] = bestMask;
      Aggregate& own = newSub[pos];
      own.clear();
      for (std::size_t c = c0; c < c1; ++c)
        own.add((bestMask >> (c - c0)) & 1u ? newSub[c] : prevSub[c]);
      own.add(planSets_[agent][best->planIndex]);
    }

    std::vector<std::size_t> selections(n);
    std::vector<char> accepted(n, 0);
    accepted[0] = 1;
    for (std::size_t pos = 0; pos < n; ++pos) {
      const std::size_t agent = overlay_.agentAt(pos);
      selections[agent] = accepted[pos] ? tentative[agent] : previous->selections[agent];
      for (std::size_t c = overlay_.firstChild(pos); c < overlay_.endChild(pos); ++c)
        accepted[c] = accepted[pos] && ((acceptMask[pos] >> (c - overlay_.firstChild(pos))) & 1u);
    }

    RunState next = evaluate(std::move(selections), t);
    next.fallbackAgents = fallbacks;
    if (previous && !improves(next, *previous)) {
      RunState kept = *previous;
      kept.iteration = t;
      kept.fallbackAgents = fallbacks;
      return kept;
    }
    return next;
  }

  std::vector<RunState> run() const {
    std::vector<RunState> trajectory;
    trajectory.reserve(config_.iterations);
    trajectory.push_back(runIteration(nullptr));
    for (std::size_t t = 2; t <= config_.iterations; ++t)
      trajectory.push_back(runIteration(&trajectory.back()));
    return trajectory;
  }

  // Exact state for a full selection vector.
  RunState evaluate(std::vector<std::size_t> selections, std::size_t iteration) const {
    RunState s;
    s.iteration = iteration;
    s.selections = std::move(selections);
    s.globalPlan = aggregateSelected(s.selections, planSets_);
    s.costs = evaluateCosts(s.globalPlan, s.selections, planSets_, config_.costSpec);
    s.objective = weightedObjective(s.costs, systemWeights_);
    s.satisfied = (!planEnv_ || satisfiesPlanEnvelope(s.globalPlan, *planEnv_)) &&
                  (!costEnv_ || satisfiesCostEnvelope(s.costs, *costEnv_));
    return s;
  }

 private:
  // Feasible beats infeasible, then strictly lower objective; earlier masks
  // (more branches kept at their previous choice) win ties.
  static bool better(const PlanChoice& a, const PlanChoice& b) {
    if (a.feasible != b.feasible) return a.feasible;
    return a.objective < b.objective;
  }

  // Root confirmation: strictly lower objective (or equal objective that
  // newly satisfies the constraints), never losing satisfaction.
  static bool improves(const RunState& next, const RunState& prev) {
    if (prev.satisfied && !next.satisfied) return false;
    if (next.objective < prev.objective) return true;
    return next.objective == prev.objective && next.satisfied && !prev.satisfied;
  }

  std::vector<Aggregate> subtreeAggregates(std::span<const std::size_t> selections) const {
    const std::size_t n = planSets_.size();
    std::vector<Aggregate> sub(n, Aggregate(m_));
    for (std::size_t pos = n; pos-- > 0;) {
      for (std::size_t c = overlay_.firstChild(pos); c < overlay_.endChild(pos); ++c)
        sub[pos].add(sub[c]);
      const std::size_t agent = overlay_.agentAt(pos);
      sub[pos].add(planSets_[agent][selections[agent]]);
    }
    return sub;
  }

  std::span<const PlanSet> planSets_;
  const TreeOverlay& overlay_;
  RunConfig config_;
  std::size_t m_ = 0;
  const ConstraintEnvelope* planEnv_ = nullptr;
  const CostEnvelope* costEnv_ = nullptr;
  BehaviorWeights systemWeights_;
};

inline std::vector<RunState> runRepetition(std::span<const PlanSet> planSets,
                                           const TreeOverlay& overlay, const RunConfig& config) {
  return CollectiveLearner(planSets, overlay, config).run();
}

// Positions agents by `config.seed`.
inline std::vector<RunState> runRepetition(std::span<const PlanSet> planSets,
                                           const RunConfig& config) {
  const TreeOverlay overlay = TreeOverlay::build(planSets.size(), config.arity, config.seed);
  return runRepetition(planSets, overlay, config);
}

}  // namespace colearn
