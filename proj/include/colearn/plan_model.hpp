#pragma once

// Agents, plans and the three cost functions of the collective choice:
// inefficiency of the global plan, mean discomfort and unfairness of the
// selected discomfort scores, and their weighted combination.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "colearn/error.hpp"

namespace colearn {

// One discrete option of an agent: a resource schedule of length m plus the
// agent's own discomfort for it.
struct Plan {
  std::vector<double> values;
  double discomfort = 0.0;

  std::size_t dimension() const { return values.size(); }
};

struct PlanSet {
  std::size_t agentId = 0;
  std::vector<Plan> plans;

  std::size_t size() const { return plans.size(); }
  const Plan& operator[](std::size_t j) const { return plans[j]; }
};

// Element-wise sum of one selected plan per agent.
struct GlobalPlan {
  std::vector<double> values;

  std::size_t dimension() const { return values.size(); }
  friend bool operator==(const GlobalPlan&, const GlobalPlan&) = default;
};

struct CostTriple {
  double inefficiency = 0.0;
  double meanDiscomfort = 0.0;
  double unfairness = 0.0;

  friend bool operator==(const CostTriple&, const CostTriple&) = default;
};

// alpha weighs unfairness, beta weighs discomfort, 1 - alpha - beta weighs
// inefficiency.
struct BehaviorWeights {
  double alpha = 0.0;
  double beta = 0.0;

  double inefficiencyWeight() const { return 1.0 - alpha - beta; }

  void validate() const {
    auto unit = [](double w) { return std::isfinite(w) && w >= 0.0 && w <= 1.0; };
    if (!unit(alpha) || !unit(beta))
      throw ConfigError("behavior weights must lie in [0,1]: alpha=" + std::to_string(alpha) +
                        " beta=" + std::to_string(beta));
    // beta grids are built with floating steps; 0.975 + 0.025 must pass.
    if (alpha + beta > 1.0 + 1e-9)
      throw ConfigError("behavior weights must satisfy alpha + beta <= 1");
  }
};

enum class CostKind { Variance, Rmse };

struct CostFunctionSpec {
  CostKind kind = CostKind::Variance;
  std::optional<std::vector<double>> target;  // RMSE only

  static CostFunctionSpec variance() { return {}; }
  static CostFunctionSpec rmse(std::vector<double> target) {
    return {CostKind::Rmse, std::move(target)};
  }

  void validate() const {
    if (kind == CostKind::Rmse && !target)
      throw ConfigError("RMSE cost function requires a target");
    if (kind == CostKind::Variance && target)
      throw ConfigError("VARIANCE cost function takes no target");
  }
};

// One agent's choice, as exchanged across public interfaces.
struct Selection {
  std::size_t agentId = 0;
  std::size_t planIndex = 0;
};

// Population variance (divides by the count). Zero for an empty sequence.
inline double populationVariance(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(xs.size());
}

inline double inefficiencyCost(std::span<const double> g, const CostFunctionSpec& spec) {
  if (spec.kind == CostKind::Variance) return populationVariance(g);
  if (!spec.target) throw ConfigError("RMSE cost function requires a target");
  const auto& target = *spec.target;
  if (target.size() != g.size())
    throw DimensionError("global plan has " + std::to_string(g.size()) +
                         " elements but the RMSE target has " + std::to_string(target.size()));
  if (g.empty()) return 0.0;
  double ss = 0.0;
  for (std::size_t u = 0; u < g.size(); ++u) ss += (g[u] - target[u]) * (g[u] - target[u]);
  return std::sqrt(ss / static_cast<double>(g.size()));
}

inline double inefficiencyCost(const GlobalPlan& g, const CostFunctionSpec& spec) {
  return inefficiencyCost(std::span<const double>(g.values), spec);
}

// Checks that every agent has at least one plan, all plans share one
// dimension and every discomfort is finite and non-negative. Returns m.
inline std::size_t validatePlanSets(std::span<const PlanSet> planSets) {
  if (planSets.empty()) throw ConfigError("no agents");
  std::optional<std::size_t> m;
  for (std::size_t i = 0; i < planSets.size(); ++i) {
    const auto& ps = planSets[i];
    if (ps.plans.empty()) throw ConfigError("agent " + std::to_string(i) + " has no plans");
    for (const auto& p : ps.plans) {
      if (!m) m = p.dimension();
      if (p.dimension() != *m)
        throw DimensionError("agent " + std::to_string(i) + " has a plan of dimension " +
                             std::to_string(p.dimension()) + ", expected " + std::to_string(*m));
      if (!std::isfinite(p.discomfort) || p.discomfort < 0.0)
        throw ConfigError("agent " + std::to_string(i) + " has an invalid discomfort score");
    }
  }
  return *m;
}

// Converts a selection list into one plan index per agent, rejecting
// missing, duplicate and out-of-range entries.
inline std::vector<std::size_t> denseSelections(std::span<const Selection> selections,
                                                std::span<const PlanSet> planSets) {
  constexpr auto unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> dense(planSets.size(), unset);
  for (const auto& s : selections) {
    if (s.agentId >= planSets.size())
      throw SelectionError("selection for unknown agent " + std::to_string(s.agentId));
    if (dense[s.agentId] != unset)
      throw SelectionError("duplicate selection for agent " + std::to_string(s.agentId));
    if (s.planIndex >= planSets[s.agentId].size())
      throw SelectionError("agent " + std::to_string(s.agentId) + " has no plan " +
                           std::to_string(s.planIndex));
    dense[s.agentId] = s.planIndex;
  }
  for (std::size_t i = 0; i < dense.size(); ++i)
    if (dense[i] == unset) throw SelectionError("missing selection for agent " + std::to_string(i));
  return dense;
}

inline std::vector<double> selectedDiscomforts(std::span<const std::size_t> dense,
                                               std::span<const PlanSet> planSets) {
  std::vector<double> scores;
  scores.reserve(dense.size());
  for (std::size_t i = 0; i < dense.size(); ++i)
    scores.push_back(planSets[i].plans[dense[i]].discomfort);
  return scores;
}

inline double meanDiscomfort(std::span<const Selection> selections,
                             std::span<const PlanSet> planSets) {
  const auto scores = selectedDiscomforts(denseSelections(selections, planSets), planSets);
  double sum = 0.0;
  for (double d : scores) sum += d;
  return sum / static_cast<double>(scores.size());
}

inline double unfairnessCost(std::span<const Selection> selections,
                             std::span<const PlanSet> planSets) {
  const auto scores = selectedDiscomforts(denseSelections(selections, planSets), planSets);
  return populationVariance(scores);
}

// Sum of the selected plans in agent order.
inline GlobalPlan aggregateSelected(std::span<const std::size_t> dense,
                                    std::span<const PlanSet> planSets) {
  GlobalPlan g;
  if (planSets.empty()) return g;
  g.values.assign(planSets.front().plans.front().dimension(), 0.0);
  for (std::size_t i = 0; i < dense.size(); ++i) {
    const auto& v = planSets[i].plans[dense[i]].values;
    for (std::size_t u = 0; u < v.size(); ++u) g.values[u] += v[u];
  }
  return g;
}

inline CostTriple evaluateCosts(const GlobalPlan& g, std::span<const std::size_t> dense,
                                std::span<const PlanSet> planSets, const CostFunctionSpec& spec) {
  const auto scores = selectedDiscomforts(dense, planSets);
  double sum = 0.0;
  for (double d : scores) sum += d;
  return {inefficiencyCost(g, spec), scores.empty() ? 0.0 : sum / static_cast<double>(scores.size()),
          populationVariance(scores)};
}

inline double weightedObjective(const CostTriple& c, const BehaviorWeights& w) {
  return w.inefficiencyWeight() * c.inefficiency + w.alpha * c.unfairness +
         w.beta * c.meanDiscomfort;
}

inline double weightedObjective(const GlobalPlan& g, std::span<const Selection> selections,
                                std::span<const PlanSet> planSets, const BehaviorWeights& w,
                                const CostFunctionSpec& spec) {
  const auto dense = denseSelections(selections, planSets);
  return weightedObjective(evaluateCosts(g, dense, planSets, spec), w);
}

}  // namespace colearn
