#pragma once

// Exhaustive enumeration of every selection combination. Used to validate
// the learning engine on instances small enough to enumerate.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "colearn/error.hpp"
#include "colearn/hard_constraints.hpp"
#include "colearn/plan_model.hpp"

namespace colearn {

struct OracleResult {
  std::uint64_t combinations = 0;
  // Unconstrained optimum of the weighted objective.
  double optimalObjective = 0.0;
  std::vector<std::size_t> optimalSelections;
  GlobalPlan optimalGlobal;
  // Combinations satisfying both envelopes, by mixed-radix code (ascending).
  std::vector<std::uint64_t> feasibleCodes;
  std::optional<double> feasibleOptimum;
  std::vector<std::size_t> feasibleSelections;

  std::size_t feasibleCount() const { return feasibleCodes.size(); }
};

inline constexpr std::uint64_t kDefaultOracleCap = std::uint64_t{1} << 20;

// Mixed-radix code of a selection vector; agent 0 is the least significant digit.
inline std::uint64_t encodeSelections(std::span<const std::size_t> selections,
                                      std::span<const PlanSet> planSets) {
  std::uint64_t code = 0;
  for (std::size_t i = selections.size(); i-- > 0;) code = code * planSets[i].size() + selections[i];
  return code;
}

inline OracleResult bruteForceOracle(std::span<const PlanSet> planSets,
                                     const BehaviorWeights& weights,
                                     const CostFunctionSpec& costSpec,
                                     const ConstraintEnvelope* planEnv = nullptr,
                                     const CostEnvelope* costEnv = nullptr,
                                     std::uint64_t cap = kDefaultOracleCap) {
  validatePlanSets(planSets);
  weights.validate();
  costSpec.validate();

  std::uint64_t total = 1;
  for (const auto& ps : planSets) {
    if (ps.size() > cap / total)
      throw OracleCapError("instance has more than " + std::to_string(cap) + " combinations");
    total *= ps.size();
  }

  OracleResult result;
  result.combinations = total;
  std::vector<std::size_t> sel(planSets.size(), 0);
  for (std::uint64_t code = 0; code < total; ++code) {
    const GlobalPlan g = aggregateSelected(sel, planSets);
    const CostTriple costs = evaluateCosts(g, sel, planSets, costSpec);
    const double obj = weightedObjective(costs, weights);
    if (code == 0 || obj < result.optimalObjective) {
      result.optimalObjective = obj;
      result.optimalSelections = sel;
      result.optimalGlobal = g;
    }
    const bool ok = (!planEnv || satisfiesPlanEnvelope(g, *planEnv)) &&
                    (!costEnv || satisfiesCostEnvelope(costs, *costEnv));
    if (ok) {
      result.feasibleCodes.push_back(code);
      if (!result.feasibleOptimum || obj < *result.feasibleOptimum) {
        result.feasibleOptimum = obj;
        result.feasibleSelections = sel;
      }
    }
    for (std::size_t i = 0; i < sel.size(); ++i) {
      if (++sel[i] < planSets[i].size()) break;
      sel[i] = 0;
    }
  }
  return result;
}

}  // namespace colearn
