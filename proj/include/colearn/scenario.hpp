#pragma once

// Synthetic plan-set generators shaped after three demand-response style
// workloads: household load curves, bike-station in/out counts and UAV
// sensing-cell coverage with a target density.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "colearn/error.hpp"
#include "colearn/plan_model.hpp"

namespace colearn {

enum class ScenarioKind { EnergyLike, BikeLike, UavLike, File };

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::EnergyLike;
  std::size_t numAgents = 1000;
  std::size_t minPlans = 10;  // per-agent plan count is drawn from [minPlans, maxPlans]
  std::size_t maxPlans = 10;
  std::size_t planSize = 144;
  std::uint64_t seed = 0;

  static ScenarioSpec defaults(ScenarioKind kind) {
    switch (kind) {
      case ScenarioKind::EnergyLike: return {kind, 1000, 10, 10, 144, 0};
      case ScenarioKind::BikeLike: return {kind, 1000, 1, 24, 98, 0};
      case ScenarioKind::UavLike: return {kind, 1000, 64, 64, 64, 0};
      case ScenarioKind::File: break;
    }
    throw ConfigError("file scenarios are loaded, not generated");
  }

  void validate() const {
    if (kind == ScenarioKind::File) throw ConfigError("file scenarios are loaded, not generated");
    if (numAgents < 1) throw ConfigError("scenario needs at least one agent");
    if (minPlans < 1 || maxPlans < minPlans) throw ConfigError("invalid plan count range");
    if (planSize < 1) throw ConfigError("plan size must be positive");
  }
};

struct Scenario {
  std::vector<PlanSet> planSets;
  CostFunctionSpec costSpec;
};

namespace detail {

inline std::size_t drawPlanCount(const ScenarioSpec& spec, std::mt19937_64& rng) {
  return std::uniform_int_distribution<std::size_t>(spec.minPlans, spec.maxPlans)(rng);
}

// Baseline plus a bump around a preferred slot; alternative plans move the
// bump earlier or later, and discomfort grows with the distance moved.
inline Scenario energyLike(const ScenarioSpec& spec, std::mt19937_64& rng) {
  const auto m = static_cast<double>(spec.planSize);
  std::uniform_real_distribution<double> baseDist(0.6, 1.4), ampDist(1.0, 3.0), widthDist(0.04, 0.12),
      noise(-0.05, 0.05);
  // Most households peak late in the window, so the uncoordinated sum is peaky.
  std::normal_distribution<double> peakDist(0.7, 0.12);
  Scenario s;
  for (std::size_t i = 0; i < spec.numAgents; ++i) {
    const double base = baseDist(rng);
    const double amp = ampDist(rng);
    const double width = widthDist(rng) * m;
    const double center = std::clamp(peakDist(rng), 0.05, 0.95) * m;
    const std::size_t k = drawPlanCount(spec, rng);
    const double maxShift = 0.35 * m;
    PlanSet ps;
    ps.agentId = i;
    for (std::size_t j = 0; j < k; ++j) {
      // 0, -d, +d, -2d, +2d, ... with d chosen so the largest shift is maxShift
      const double step = k > 1 ? maxShift / std::ceil(static_cast<double>(k - 1) / 2.0) : 0.0;
      const double magnitude = step * std::ceil(static_cast<double>(j) / 2.0);
      const double shift = j % 2 == 1 ? -magnitude : magnitude;
      Plan p;
      p.values.resize(spec.planSize);
      for (std::size_t u = 0; u < spec.planSize; ++u) {
        const double z = (static_cast<double>(u) - (center + shift)) / width;
        p.values[u] = std::max(0.0, base + amp * std::exp(-0.5 * z * z) + noise(rng));
      }
      p.discomfort = maxShift > 0.0 ? std::abs(shift) / maxShift : 0.0;
      ps.plans.push_back(std::move(p));
    }
    s.planSets.push_back(std::move(ps));
  }
  return s;
}

// Each plan is a handful of trips: -1 at the pickup station, +1 at the
// return station. Users favour stations near a home station.
inline Scenario bikeLike(const ScenarioSpec& spec, std::mt19937_64& rng) {
  const auto m = spec.planSize;
  std::uniform_int_distribution<std::size_t> stationDist(0, m - 1);
  std::uniform_int_distribution<int> tripsDist(1, 3);
  std::normal_distribution<double> offsetDist(0.0, static_cast<double>(m) / 12.0);
  std::uniform_real_distribution<double> jitter(0.0, 0.05);
  auto near = [&](std::size_t home) {
    const auto off = static_cast<long>(std::lround(offsetDist(rng)));
    const auto mm = static_cast<long>(m);
    return static_cast<std::size_t>(((static_cast<long>(home) + off) % mm + mm) % mm);
  };
  Scenario s;
  for (std::size_t i = 0; i < spec.numAgents; ++i) {
    const std::size_t home = stationDist(rng);
    const std::size_t k = drawPlanCount(spec, rng);
    PlanSet ps;
    ps.agentId = i;
    for (std::size_t j = 0; j < k; ++j) {
      Plan p;
      p.values.assign(m, 0.0);
      const int trips = tripsDist(rng);
      for (int t = 0; t < trips; ++t) {
        p.values[near(home)] -= 1.0;
        p.values[stationDist(rng)] += 1.0;
      }
      p.discomfort = static_cast<double>(j) / 24.0 + jitter(rng);
      ps.plans.push_back(std::move(p));
    }
    s.planSets.push_back(std::move(ps));
  }
  return s;
}

// Cells form a square-ish grid. Plan j senses cell j (mod m) with an amount
// that decays with the distance from the drone's base; discomfort is that
// distance. The RMSE target is a smooth two-bump density scaled to the
// expected total sensing.
inline Scenario uavLike(const ScenarioSpec& spec, std::mt19937_64& rng) {
  const auto m = spec.planSize;
  const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(m))));
  auto cellXY = [side](std::size_t c) {
    return std::pair<double, double>(static_cast<double>(c % side), static_cast<double>(c / side));
  };
  const double maxDist = std::sqrt(2.0) * static_cast<double>(side - 1) + 1e-12;
  std::uniform_int_distribution<std::size_t> cellDist(0, m - 1);
  std::uniform_real_distribution<double> amountDist(5.0, 15.0);
  std::uniform_int_distribution<std::size_t> offsetDist(0, m - 1);

  Scenario s;
  double expectedTotal = 0.0;
  for (std::size_t i = 0; i < spec.numAgents; ++i) {
    const auto [bx, by] = cellXY(cellDist(rng));
    const double amount = amountDist(rng);
    const std::size_t k = drawPlanCount(spec, rng);
    const std::size_t offset = k < m ? offsetDist(rng) : 0;
    PlanSet ps;
    ps.agentId = i;
    double meanSensed = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t cell = (offset + j) % m;
      const auto [cx, cy] = cellXY(cell);
      const double dist = std::hypot(cx - bx, cy - by) / maxDist;
      Plan p;
      p.values.assign(m, 0.0);
      p.values[cell] = amount * (1.0 - 0.5 * dist);
      p.discomfort = dist;
      meanSensed += p.values[cell];
      ps.plans.push_back(std::move(p));
    }
    expectedTotal += meanSensed / static_cast<double>(k);
    s.planSets.push_back(std::move(ps));
  }

  std::vector<double> target(m);
  double mass = 0.0;
  const double s2 = std::pow(static_cast<double>(side) / 4.0, 2);
  for (std::size_t c = 0; c < m; ++c) {
    const auto [x, y] = cellXY(c);
    const double a = 0.3 * static_cast<double>(side - 1), b = 0.7 * static_cast<double>(side - 1);
    target[c] = std::exp(-((x - a) * (x - a) + (y - a) * (y - a)) / (2 * s2)) +
                0.6 * std::exp(-((x - b) * (x - b) + (y - b) * (y - b)) / (2 * s2)) + 0.05;
    mass += target[c];
  }
  for (double& t : target) t *= expectedTotal / mass;
  s.costSpec = CostFunctionSpec::rmse(std::move(target));
  return s;
}

}  // namespace detail

inline Scenario generateScenario(const ScenarioSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  switch (spec.kind) {
    case ScenarioKind::EnergyLike: return detail::energyLike(spec, rng);
    case ScenarioKind::BikeLike: return detail::bikeLike(spec, rng);
    case ScenarioKind::UavLike: return detail::uavLike(spec, rng);
    case ScenarioKind::File: break;
  }
  throw ConfigError("file scenarios are loaded, not generated");
}

inline ScenarioKind parseScenarioKind(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (s == "ENERGY" || s == "ENERGY_LIKE") return ScenarioKind::EnergyLike;
  if (s == "BIKE" || s == "BIKE_LIKE") return ScenarioKind::BikeLike;
  if (s == "UAV" || s == "UAV_LIKE") return ScenarioKind::UavLike;
  if (s == "FILE") return ScenarioKind::File;
  throw ConfigError("unknown scenario '" + s + "' (expected energy, bike, uav or file)");
}

inline const char* scenarioName(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::EnergyLike: return "ENERGY_LIKE";
    case ScenarioKind::BikeLike: return "BIKE_LIKE";
    case ScenarioKind::UavLike: return "UAV_LIKE";
    case ScenarioKind::File: return "FILE";
  }
  return "?";
}

}  // namespace colearn
