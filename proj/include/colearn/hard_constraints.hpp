#pragma once

// Hard constraints on the global plan (per-element envelopes) and on the
// aggregate costs (scalar envelopes), the expected-satisfaction score used
// during cold start, and satisfaction-rate bookkeeping.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "colearn/error.hpp"
#include "colearn/plan_model.hpp"

namespace colearn {

using Bound = std::optional<double>;

namespace detail {

// Infinite bounds constrain nothing and are stored as absent.
inline Bound normalizeUpper(Bound b) {
  if (b && std::isnan(*b)) throw ConfigError("NaN upper bound");
  if (b && *b == INFINITY) return std::nullopt;
  return b;
}

inline Bound normalizeLower(Bound b) {
  if (b && std::isnan(*b)) throw ConfigError("NaN lower bound");
  if (b && *b == -INFINITY) return std::nullopt;
  return b;
}

}  // namespace detail

// Inclusive per-element bounds on the global plan. Absent entries are
// unconstrained.
class ConstraintEnvelope {
 public:
  ConstraintEnvelope() = default;
  explicit ConstraintEnvelope(std::size_t m) : upper_(m), lower_(m) {}

  ConstraintEnvelope(std::vector<Bound> upper, std::vector<Bound> lower)
      : upper_(std::move(upper)), lower_(std::move(lower)) {
    if (upper_.size() != lower_.size())
      throw DimensionError("upper and lower bounds differ in length");
    for (std::size_t u = 0; u < upper_.size(); ++u) check(u);
  }

  static ConstraintEnvelope upperOnly(std::vector<Bound> upper) {
    const auto m = upper.size();
    return {std::move(upper), std::vector<Bound>(m)};
  }

  // Same bounds on every element.
  static ConstraintEnvelope uniform(std::size_t m, Bound lower, Bound upper) {
    return {std::vector<Bound>(m, upper), std::vector<Bound>(m, lower)};
  }

  std::size_t dimension() const { return upper_.size(); }
  const std::vector<Bound>& upper() const { return upper_; }
  const std::vector<Bound>& lower() const { return lower_; }

  void setUpper(std::size_t u, Bound b) {
    upper_.at(u) = b;
    check(u);
  }
  void setLower(std::size_t u, Bound b) {
    lower_.at(u) = b;
    check(u);
  }

  bool isActive() const {
    for (std::size_t u = 0; u < upper_.size(); ++u)
      if (upper_[u] || lower_[u]) return true;
    return false;
  }

  // True iff every bound of `other` is at least as tight as ours.
  bool contains(const ConstraintEnvelope& other) const {
    if (other.dimension() != dimension()) return false;
    for (std::size_t u = 0; u < upper_.size(); ++u) {
      if (upper_[u] && (!other.upper_[u] || *other.upper_[u] > *upper_[u])) return false;
      if (lower_[u] && (!other.lower_[u] || *other.lower_[u] < *lower_[u])) return false;
    }
    return true;
  }

  friend bool operator==(const ConstraintEnvelope&, const ConstraintEnvelope&) = default;

 private:
  void check(std::size_t u) {
    upper_[u] = detail::normalizeUpper(upper_[u]);
    lower_[u] = detail::normalizeLower(lower_[u]);
    if (upper_[u] && lower_[u] && *lower_[u] > *upper_[u])
      throw ConfigError("element " + std::to_string(u) + ": lower bound exceeds upper bound");
  }

  std::vector<Bound> upper_;
  std::vector<Bound> lower_;
};

struct ScalarBounds {
  Bound lower;
  Bound upper;

  bool isActive() const { return lower || upper; }
  bool admits(double x) const { return (!upper || x <= *upper) && (!lower || x >= *lower); }
  // Slack of x against the present sides; absent sides contribute zero.
  double expectation(double x) const {
    double e = 0.0;
    if (upper) e += *upper - x;
    if (lower) e += x - *lower;
    return e;
  }

  friend bool operator==(const ScalarBounds&, const ScalarBounds&) = default;
};

// Inclusive bounds on the aggregate cost triple.
class CostEnvelope {
 public:
  CostEnvelope() = default;
  CostEnvelope(ScalarBounds inefficiency, ScalarBounds meanDiscomfort, ScalarBounds unfairness)
      : inefficiency_(normalize(inefficiency, "inefficiency")),
        meanDiscomfort_(normalize(meanDiscomfort, "discomfort")),
        unfairness_(normalize(unfairness, "unfairness")) {}

  const ScalarBounds& inefficiency() const { return inefficiency_; }
  const ScalarBounds& meanDiscomfort() const { return meanDiscomfort_; }
  const ScalarBounds& unfairness() const { return unfairness_; }

  void setInefficiency(ScalarBounds b) { inefficiency_ = normalize(b, "inefficiency"); }
  void setMeanDiscomfort(ScalarBounds b) { meanDiscomfort_ = normalize(b, "discomfort"); }
  void setUnfairness(ScalarBounds b) { unfairness_ = normalize(b, "unfairness"); }

  bool isActive() const {
    return inefficiency_.isActive() || meanDiscomfort_.isActive() || unfairness_.isActive();
  }

  friend bool operator==(const CostEnvelope&, const CostEnvelope&) = default;

 private:
  static ScalarBounds normalize(ScalarBounds b, const char* name) {
    b.upper = detail::normalizeUpper(b.upper);
    b.lower = detail::normalizeLower(b.lower);
    if (b.upper && b.lower && *b.lower > *b.upper)
      throw ConfigError(std::string(name) + ": lower bound exceeds upper bound");
    return b;
  }

  ScalarBounds inefficiency_;
  ScalarBounds meanDiscomfort_;
  ScalarBounds unfairness_;
};

inline void requireDimension(std::size_t got, const ConstraintEnvelope& env) {
  if (got != env.dimension())
    throw DimensionError("plan has " + std::to_string(got) + " elements but the envelope has " +
                         std::to_string(env.dimension()));
}

inline bool satisfiesPlanEnvelope(std::span<const double> g, const ConstraintEnvelope& env) {
  requireDimension(g.size(), env);
  const auto& up = env.upper();
  const auto& lo = env.lower();
  for (std::size_t u = 0; u < g.size(); ++u) {
    if (up[u] && g[u] > *up[u]) return false;
    if (lo[u] && g[u] < *lo[u]) return false;
  }
  return true;
}

inline bool satisfiesPlanEnvelope(const GlobalPlan& g, const ConstraintEnvelope& env) {
  return satisfiesPlanEnvelope(std::span<const double>(g.values), env);
}

inline bool satisfiesCostEnvelope(const CostTriple& c, const CostEnvelope& env) {
  return env.inefficiency().admits(c.inefficiency) &&
         env.meanDiscomfort().admits(c.meanDiscomfort) && env.unfairness().admits(c.unfairness);
}

// Sum over bounded elements of (upper - p) plus (p - lower). An element
// bounded on both sides contributes (upper - lower) exactly, so plans differ
// only through their one-sided elements.
inline double expectedSatisfaction(std::span<const double> p, const ConstraintEnvelope& env) {
  requireDimension(p.size(), env);
  const auto& up = env.upper();
  const auto& lo = env.lower();
  double e = 0.0;
  for (std::size_t u = 0; u < p.size(); ++u) {
    if (up[u] && lo[u]) e += *up[u] - *lo[u];
    else if (up[u]) e += *up[u] - p[u];
    else if (lo[u]) e += p[u] - *lo[u];
  }
  return e;
}

inline double expectedSatisfaction(const Plan& p, const ConstraintEnvelope& env) {
  return expectedSatisfaction(std::span<const double>(p.values), env);
}

inline double expectedSatisfaction(const CostTriple& estimate, const CostEnvelope& env) {
  return env.inefficiency().expectation(estimate.inefficiency) +
         env.meanDiscomfort().expectation(estimate.meanDiscomfort) +
         env.unfairness().expectation(estimate.unfairness);
}

// Total amount by which `g` lies outside the envelope; zero iff satisfied.
inline double planViolation(std::span<const double> g, const ConstraintEnvelope& env) {
  requireDimension(g.size(), env);
  const auto& up = env.upper();
  const auto& lo = env.lower();
  double v = 0.0;
  for (std::size_t u = 0; u < g.size(); ++u) {
    if (up[u] && g[u] > *up[u]) v += g[u] - *up[u];
    if (lo[u] && g[u] < *lo[u]) v += *lo[u] - g[u];
  }
  return v;
}

inline double costViolation(const CostTriple& c, const CostEnvelope& env) {
  auto outside = [](const ScalarBounds& b, double x) {
    if (b.upper && x > *b.upper) return x - *b.upper;
    if (b.lower && x < *b.lower) return *b.lower - x;
    return 0.0;
  };
  return outside(env.inefficiency(), c.inefficiency) +
         outside(env.meanDiscomfort(), c.meanDiscomfort) + outside(env.unfairness(), c.unfairness);
}

// Upper bounds only: the part of an envelope a partial (subtree) sum of
// non-negative plans can already violate.
inline bool satisfiesUpperBounds(std::span<const double> g, const ConstraintEnvelope& env) {
  requireDimension(g.size(), env);
  const auto& up = env.upper();
  for (std::size_t u = 0; u < g.size(); ++u)
    if (up[u] && g[u] > *up[u]) return false;
  return true;
}

// Index among `candidates` of the plan with the highest expected
// satisfaction. Cost bounds add their own expectation terms, evaluated on
// `costEstimates[j]` for plan j; without estimates the plan's own discomfort
// stands in for the mean-discomfort term. Ties go to the lower `tieScores[j]`
// when given, then to the lower discomfort, then to the earlier candidate.
inline std::size_t selectByExpectedSatisfaction(const PlanSet& planSet,
                                                std::span<const std::size_t> candidates,
                                                const ConstraintEnvelope& env,
                                                const CostEnvelope& costEnv = {},
                                                std::span<const CostTriple> costEstimates = {},
                                                std::span<const double> tieScores = {}) {
  if (candidates.empty()) throw ConfigError("no candidate plans");
  const bool useCosts = costEnv.isActive();
  if (useCosts && costEstimates.empty() &&
      (costEnv.inefficiency().isActive() || costEnv.unfairness().isActive()))
    throw ConfigError("inefficiency and unfairness bounds need per-plan cost estimates");
  if (!costEstimates.empty() && costEstimates.size() != planSet.size())
    throw ConfigError("one cost estimate per plan is required");
  if (!tieScores.empty() && tieScores.size() != planSet.size())
    throw ConfigError("one tie score per plan is required");
  auto before = [&](std::size_t a, std::size_t b) {
    if (!tieScores.empty() && tieScores[a] != tieScores[b]) return tieScores[a] < tieScores[b];
    return planSet[a].discomfort < planSet[b].discomfort;
  };

  std::size_t best = candidates.front();
  double bestScore = 0.0;
  bool first = true;
  for (const std::size_t j : candidates) {
    const Plan& p = planSet.plans.at(j);
    double score = env.dimension() == 0 ? 0.0 : expectedSatisfaction(p, env);
    if (useCosts) {
      const CostTriple est = costEstimates.empty() ? CostTriple{0.0, p.discomfort, 0.0}
                                                   : costEstimates[j];
      score += expectedSatisfaction(est, costEnv);
    }
    if (first || score > bestScore || (score == bestScore && before(j, best))) {
      best = j;
      bestScore = score;
      first = false;
    }
  }
  return best;
}

inline std::size_t selectByExpectedSatisfaction(const PlanSet& planSet,
                                                const ConstraintEnvelope& env,
                                                const CostEnvelope& costEnv = {},
                                                std::span<const CostTriple> costEstimates = {}) {
  if (planSet.plans.empty()) throw ConfigError("agent has no plans");
  std::vector<std::size_t> all(planSet.size());
  for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
  return selectByExpectedSatisfaction(planSet, all, env, costEnv, costEstimates);
}

struct SatisfactionTally {
  std::size_t satisfied = 0;
  std::size_t trials = 0;

  void record(bool ok) {
    ++trials;
    if (ok) ++satisfied;
  }
};

inline double satisfactionRate(const SatisfactionTally& t) {
  if (t.trials == 0) throw UndefinedRateError("satisfaction rate over zero trials");
  if (t.satisfied > t.trials) throw ConfigError("more satisfactions than trials");
  return static_cast<double>(t.satisfied) / static_cast<double>(t.trials);
}

}  // namespace colearn
