#pragma once

// Repetitions over random tree positionings, satisfaction-rate measurement,
// envelope-level sweeps and the beta-sweep behavioral-shift analysis.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "colearn/error.hpp"
#include "colearn/hard_constraints.hpp"
#include "colearn/learning_engine.hpp"
#include "colearn/plan_model.hpp"
#include "colearn/tree_overlay.hpp"

namespace colearn {

struct BetaSweep {
  double start = 0.0;
  double end = 1.0;
  double step = 0.025;
  // Added to the soft run's mean discomfort to form the hard run's upper
  // bound. +infinity leaves the hard run unconstrained.
  double discomfortBoundOffset = 0.0;

  // Grid points start + i*step up to `end` (inclusive, within rounding).
  std::vector<double> grid() const {
    if (!(step > 0.0)) throw ConfigError("beta sweep step must be positive");
    if (end < start) throw ConfigError("beta sweep end precedes start");
    std::vector<double> g;
    const auto count = static_cast<std::size_t>(std::floor((end - start) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) g.push_back(start + static_cast<double>(i) * step);
    return g;
  }
};

struct ExperimentSpec {
  std::size_t repetitions = 200;
  RunConfig run;  // template; the seed is replaced per repetition
  // Explicit envelope levels for a level sweep; derived from
  // `levelQuantiles` when empty.
  std::vector<ConstraintEnvelope> envelopeLevels;
  std::vector<double> levelQuantiles{0.0, 0.002, 0.005};
  std::optional<BetaSweep> betaSweep;
  std::uint64_t baseSeed = 0;
  std::size_t threads = 0;  // 0: hardware concurrency

  void validate() const {
    if (repetitions < 1) throw ConfigError("repetitions must be at least 1");
    if (betaSweep) (void)betaSweep->grid();
    for (double q : levelQuantiles)
      if (!(q >= 0.0 && q <= 0.5)) throw ConfigError("level quantiles must lie in [0, 0.5]");
  }
};

struct IterationSummary {
  CostTriple costs;
  bool satisfied = true;
  double objective = 0.0;
};

struct RepetitionResult {
  std::uint64_t seed = 0;
  std::vector<IterationSummary> trajectory;
  RunState final;
};

struct ExperimentReport {
  std::vector<RepetitionResult> repetitions;
  SatisfactionTally tally;
  // Lowest final objective among satisfied repetitions, or among all of them
  // when none is satisfied.
  double bestObjective = 0.0;
  std::size_t bestRepetition = 0;
  CostTriple meanFinalCosts;

  double satisfactionRate() const { return colearn::satisfactionRate(tally); }
  const RunState& best() const { return repetitions[bestRepetition].final; }
};

namespace detail {

template <class Fn>
void parallelFor(std::size_t count, std::size_t threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// Linear interpolation between closest ranks.
inline double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw ConfigError("quantile of an empty sequence");
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

}  // namespace detail

inline ExperimentReport runExperiment(std::span<const PlanSet> planSets,
                                      const ExperimentSpec& spec) {
  spec.validate();
  const std::size_t m = validatePlanSets(planSets);
  spec.run.validate(planSets.size(), m);

  ExperimentReport report;
  report.repetitions.resize(spec.repetitions);
  detail::parallelFor(spec.repetitions, spec.threads, [&](std::size_t j) {
    RunConfig config = spec.run;
    config.seed = spec.baseSeed + j;
    const TreeOverlay overlay = TreeOverlay::build(planSets.size(), config.arity, config.seed);
    auto trajectory = runRepetition(planSets, overlay, config);
    RepetitionResult& r = report.repetitions[j];
    r.seed = config.seed;
    r.trajectory.reserve(trajectory.size());
    for (const auto& s : trajectory) r.trajectory.push_back({s.costs, s.satisfied, s.objective});
    r.final = std::move(trajectory.back());
  });

  std::optional<std::size_t> bestSat;
  std::size_t bestAny = 0;
  CostTriple sum;
  for (std::size_t j = 0; j < report.repetitions.size(); ++j) {
    const RunState& f = report.repetitions[j].final;
    report.tally.record(f.satisfied);
    sum.inefficiency += f.costs.inefficiency;
    sum.meanDiscomfort += f.costs.meanDiscomfort;
    sum.unfairness += f.costs.unfairness;
    if (f.objective < report.repetitions[bestAny].final.objective) bestAny = j;
    if (f.satisfied && (!bestSat || f.objective < report.repetitions[*bestSat].final.objective))
      bestSat = j;
  }
  const double reps = static_cast<double>(report.repetitions.size());
  report.meanFinalCosts = {sum.inefficiency / reps, sum.meanDiscomfort / reps,
                           sum.unfairness / reps};
  report.bestRepetition = bestSat.value_or(bestAny);
  report.bestObjective = report.repetitions[report.bestRepetition].final.objective;
  return report;
}

struct BetaPoint {
  double beta = 0.0;
  CostTriple soft;  // mean final costs without hard constraints
  CostTriple hard;  // mean final costs under the discomfort bound
  double hardSatisfactionRate = 0.0;
  double matchedBeta = 0.0;  // grid beta whose soft inefficiency is closest to hard.inefficiency
  double shift = 0.0;        // beta - matchedBeta
};

struct BehavioralShiftReport {
  std::vector<BetaPoint> points;
  double meanShift = 0.0;
};

// For every grid beta: a soft run gives (D, I); a run with mean discomfort
// bounded above by D gives I'; the soft grid point with the inefficiency
// closest to I' gives beta'. Ties prefer beta itself, then the smaller beta'.
inline BehavioralShiftReport behavioralShift(std::span<const PlanSet> planSets,
                                             const ExperimentSpec& spec) {
  if (!spec.betaSweep) throw ConfigError("behavioral shift needs a beta sweep");
  const auto grid = spec.betaSweep->grid();

  BehavioralShiftReport out;
  out.points.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    BetaPoint& pt = out.points[i];
    pt.beta = grid[i];

    ExperimentSpec soft = spec;
    soft.run.weights.beta = pt.beta;
    soft.run.agentWeights.clear();
    soft.run.planEnv.reset();
    soft.run.costEnv.reset();
    pt.soft = runExperiment(planSets, soft).meanFinalCosts;

    ExperimentSpec hard = soft;
    CostEnvelope bound;
    bound.setMeanDiscomfort(
        {std::nullopt, pt.soft.meanDiscomfort + spec.betaSweep->discomfortBoundOffset});
    hard.run.costEnv = bound;
    const ExperimentReport hardReport = runExperiment(planSets, hard);
    pt.hard = hardReport.meanFinalCosts;
    pt.hardSatisfactionRate = hardReport.satisfactionRate();
  }

  double shiftSum = 0.0;
  for (std::size_t i = 0; i < out.points.size(); ++i) {
    BetaPoint& pt = out.points[i];
    std::size_t match = i;
    double bestGap = std::abs(out.points[i].soft.inefficiency - pt.hard.inefficiency);
    for (std::size_t q = 0; q < out.points.size(); ++q) {
      const double gap = std::abs(out.points[q].soft.inefficiency - pt.hard.inefficiency);
      if (gap < bestGap) {
        bestGap = gap;
        match = q;
      }
    }
    pt.matchedBeta = out.points[match].beta;
    pt.shift = pt.beta - pt.matchedBeta;
    shiftSum += pt.shift;
  }
  out.meanShift = out.points.empty() ? 0.0 : shiftSum / static_cast<double>(out.points.size());
  return out;
}

struct LevelOutcome {
  ConstraintEnvelope envelope;
  std::optional<double> quantile;  // set for derived levels
  ExperimentReport report;
};

struct LevelSweepResult {
  std::optional<GlobalPlan> medianSoftPlan;  // set when levels were derived
  std::vector<LevelOutcome> levels;
};

// Element-wise median of the final global plans.
inline GlobalPlan medianGlobalPlan(const ExperimentReport& report) {
  const auto& reps = report.repetitions;
  GlobalPlan med{std::vector<double>(reps.front().final.globalPlan.dimension())};
  std::vector<double> column(reps.size());
  for (std::size_t u = 0; u < med.values.size(); ++u) {
    for (std::size_t j = 0; j < reps.size(); ++j) column[j] = reps[j].final.globalPlan.values[u];
    med.values[u] = detail::quantile(column, 0.5);
  }
  return med;
}

// Uniform band [quantile(q), quantile(1-q)] of the values of `plan`.
inline ConstraintEnvelope quantileBand(const GlobalPlan& plan, double q) {
  const double lo = detail::quantile(plan.values, q);
  const double hi = detail::quantile(plan.values, 1.0 - q);
  return ConstraintEnvelope::uniform(plan.dimension(), lo, hi);
}

inline LevelSweepResult envelopeLevelSweep(std::span<const PlanSet> planSets,
                                           const ExperimentSpec& spec) {
  spec.validate();
  LevelSweepResult out;
  std::vector<std::pair<ConstraintEnvelope, std::optional<double>>> levels;
  if (!spec.envelopeLevels.empty()) {
    for (const auto& e : spec.envelopeLevels) levels.emplace_back(e, std::nullopt);
  } else {
    ExperimentSpec soft = spec;
    soft.run.planEnv.reset();
    soft.run.costEnv.reset();
    out.medianSoftPlan = medianGlobalPlan(runExperiment(planSets, soft));
    for (double q : spec.levelQuantiles) levels.emplace_back(quantileBand(*out.medianSoftPlan, q), q);
  }
  for (auto& [env, q] : levels) {
    ExperimentSpec level = spec;
    level.run.planEnv = env;
    out.levels.push_back({env, q, runExperiment(planSets, level)});
  }
  return out;
}

}  // namespace colearn
