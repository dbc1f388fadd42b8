#pragma once

// Properties-style run configuration (key=value per line, '#' or '!'
// comments) and assembly of a runnable problem from it.

#include <cctype>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "colearn/constraint_io.hpp"
#include "colearn/error.hpp"
#include "colearn/experiment.hpp"
#include "colearn/plan_io.hpp"
#include "colearn/scenario.hpp"
#include "colearn/text.hpp"

namespace colearn {

using Properties = std::map<std::string, std::string>;

inline const std::set<std::string>& knownConfigKeys() {
  static const std::set<std::string> keys{
      "numAgents",   "numIterations", "numRepetitions", "alpha",        "beta",
      "costFunction", "scenario",     "planDir",        "globalConstraintFile",
      "costConstraintFile", "seed",   "outputDir",      "numPlans",     "planSize",
      "numChildren", "targetFile",    "levelQuantiles", "betaStep",     "threads"};
  return keys;
}

inline Properties parseProperties(const std::vector<std::string>& lines, const std::string& source) {
  Properties props;
  for (std::size_t l = 0; l < lines.size(); ++l) {
    const auto line = text::trim(lines[l]);
    if (line.empty() || line.front() == '#' || line.front() == '!') continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(l + 1);
    if (eq == std::string_view::npos) throw ParseError(where + ": expected key=value");
    std::string key(text::trim(line.substr(0, eq)));
    if (!knownConfigKeys().contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    props[key] = std::string(text::trim(line.substr(eq + 1)));
  }
  return props;
}

inline Properties readProperties(const std::filesystem::path& path) {
  return parseProperties(text::readLines(path), path.string());
}

struct Settings {
  ScenarioKind scenario = ScenarioKind::EnergyLike;
  std::optional<std::size_t> numAgents;
  std::optional<std::size_t> numPlans;
  std::optional<std::size_t> planSize;
  std::size_t iterations = 40;
  std::size_t repetitions = 200;
  std::size_t numChildren = 2;
  std::size_t threads = 0;
  double alpha = 0.0;
  double beta = 0.0;
  std::optional<CostKind> costFunction;
  std::optional<std::filesystem::path> planDir;
  std::optional<std::filesystem::path> globalConstraintFile;
  std::optional<std::filesystem::path> costConstraintFile;
  std::optional<std::filesystem::path> targetFile;
  std::filesystem::path outputDir = "output";
  std::uint64_t seed = 0;
  std::vector<double> levelQuantiles{0.0, 0.002, 0.005};
  double betaStep = 0.025;
};

inline Settings settingsFromProperties(const Properties& props) {
  Settings s;
  auto where = [](const std::string& key) { return "key '" + key + "'"; };
  auto count = [&](const std::string& key) {
    try {
      return static_cast<std::size_t>(text::parseCount(props.at(key), where(key)));
    } catch (const ParseError& e) {
      throw ConfigError(e.what());
    }
  };
  auto real = [&](const std::string& key) {
    try {
      return text::parseNumber(props.at(key), where(key));
    } catch (const ParseError& e) {
      throw ConfigError(e.what());
    }
  };

  for (const auto& [key, value] : props)
    if (!knownConfigKeys().contains(key)) throw ConfigError("unknown key '" + key + "'");

  if (props.contains("numAgents")) s.numAgents = count("numAgents");
  if (props.contains("numPlans")) s.numPlans = count("numPlans");
  if (props.contains("planSize")) s.planSize = count("planSize");
  if (props.contains("numIterations")) s.iterations = count("numIterations");
  if (props.contains("numRepetitions")) s.repetitions = count("numRepetitions");
  if (props.contains("numChildren")) s.numChildren = count("numChildren");
  if (props.contains("threads")) s.threads = count("threads");
  if (props.contains("seed")) s.seed = count("seed");
  if (props.contains("alpha")) s.alpha = real("alpha");
  if (props.contains("beta")) s.beta = real("beta");
  if (props.contains("betaStep")) s.betaStep = real("betaStep");

  if (s.numAgents && *s.numAgents < 1) throw ConfigError("key 'numAgents': must be positive");
  if (s.numPlans && *s.numPlans < 1) throw ConfigError("key 'numPlans': must be positive");
  if (s.planSize && *s.planSize < 1) throw ConfigError("key 'planSize': must be positive");
  if (s.iterations < 1) throw ConfigError("key 'numIterations': must be at least 1");
  if (s.repetitions < 1) throw ConfigError("key 'numRepetitions': must be at least 1");
  if (s.numChildren < 1 || s.numChildren > RunConfig::kMaxArity)
    throw ConfigError("key 'numChildren': must lie in [1," + std::to_string(RunConfig::kMaxArity) +
                      "]");
  if (!(s.betaStep > 0.0)) throw ConfigError("key 'betaStep': must be positive");
  try {
    BehaviorWeights{s.alpha, s.beta}.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("keys 'alpha'/'beta': ") + e.what());
  }

  if (auto it = props.find("costFunction"); it != props.end()) {
    std::string v = it->second;
    for (auto& c : v) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (v == "VAR" || v == "VARIANCE") s.costFunction = CostKind::Variance;
    else if (v == "RMSE") s.costFunction = CostKind::Rmse;
    else throw ConfigError("key 'costFunction': expected VAR or RMSE, got '" + it->second + "'");
  }

  auto path = [&](const char* key, std::optional<std::filesystem::path>& out) {
    if (auto it = props.find(key); it != props.end() && !it->second.empty()) out = it->second;
  };
  path("planDir", s.planDir);
  path("globalConstraintFile", s.globalConstraintFile);
  path("costConstraintFile", s.costConstraintFile);
  path("targetFile", s.targetFile);
  if (auto it = props.find("outputDir"); it != props.end()) {
    if (it->second.empty()) throw ConfigError("key 'outputDir': empty");
    s.outputDir = it->second;
  }

  if (auto it = props.find("scenario"); it != props.end()) {
    try {
      s.scenario = parseScenarioKind(it->second);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("key 'scenario': ") + e.what());
    }
  } else if (s.planDir) {
    s.scenario = ScenarioKind::File;
  }
  if (s.scenario == ScenarioKind::File && !s.planDir)
    throw ConfigError("key 'planDir': required for the file scenario");

  if (auto it = props.find("levelQuantiles"); it != props.end()) {
    s.levelQuantiles.clear();
    for (auto f : text::split(it->second, ',')) {
      double q = 0.0;
      try {
        q = text::parseNumber(f, "key 'levelQuantiles'");
      } catch (const ParseError& e) {
        throw ConfigError(e.what());
      }
      if (!(q >= 0.0 && q <= 0.5)) throw ConfigError("key 'levelQuantiles': values must lie in [0, 0.5]");
      s.levelQuantiles.push_back(q);
    }
  }
  return s;
}

inline Settings parseConfig(const std::filesystem::path& path) {
  return settingsFromProperties(readProperties(path));
}

// Plan sets plus a ready-to-run experiment.
struct Problem {
  std::vector<PlanSet> planSets;
  ExperimentSpec experiment;
};

inline Problem loadProblem(const Settings& s) {
  Problem p;
  std::optional<CostFunctionSpec> generatedCost;
  if (s.scenario == ScenarioKind::File) {
    p.planSets = loadPlanSets(*s.planDir);
    if (s.numAgents) {
      if (*s.numAgents > p.planSets.size())
        throw ConfigError("key 'numAgents': " + std::to_string(*s.numAgents) +
                          " requested but " + s.planDir->string() + " holds " +
                          std::to_string(p.planSets.size()));
      p.planSets.resize(*s.numAgents);
    }
  } else {
    ScenarioSpec spec = ScenarioSpec::defaults(s.scenario);
    if (s.numAgents) spec.numAgents = *s.numAgents;
    if (s.numPlans) spec.minPlans = spec.maxPlans = *s.numPlans;
    if (s.planSize) spec.planSize = *s.planSize;
    spec.seed = s.seed;
    Scenario generated = generateScenario(spec);
    p.planSets = std::move(generated.planSets);
    generatedCost = std::move(generated.costSpec);
  }
  const std::size_t m = validatePlanSets(p.planSets);

  CostFunctionSpec cost;
  const bool wantRmse = s.costFunction ? *s.costFunction == CostKind::Rmse
                                       : (s.targetFile || (generatedCost && generatedCost->target));
  if (wantRmse) {
    if (s.targetFile)
      cost = CostFunctionSpec::rmse(loadVector(*s.targetFile));
    else if (generatedCost && generatedCost->target)
      cost = *generatedCost;
    else
      throw ConfigError("key 'targetFile': RMSE needs a target");
    if (cost.target->size() != m)
      throw DimensionError("RMSE target has " + std::to_string(cost.target->size()) +
                           " values, plans have " + std::to_string(m));
  }

  auto [planEnv, costEnv] = parseConstraintFiles(s.globalConstraintFile, s.costConstraintFile, m);

  ExperimentSpec& e = p.experiment;
  e.repetitions = s.repetitions;
  e.baseSeed = s.seed;
  e.threads = s.threads;
  e.levelQuantiles = s.levelQuantiles;
  e.betaSweep = BetaSweep{0.0, 1.0 - s.alpha, s.betaStep, 0.0};
  e.run.iterations = s.iterations;
  e.run.weights = {s.alpha, s.beta};
  e.run.arity = s.numChildren;
  e.run.costSpec = std::move(cost);
  e.run.seed = s.seed;
  if (planEnv.isActive()) e.run.planEnv = std::move(planEnv);
  if (costEnv.isActive()) e.run.costEnv = std::move(costEnv);
  return p;
}

}  // namespace colearn
