// Command-line entry point: run experiments, sweeps, the brute-force oracle
// and the scenario generators.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "colearn/colearn.hpp"

namespace fs = std::filesystem;
using namespace colearn;

namespace {

struct KeyFlags {
  std::string config;
  bool ci = false;
  std::map<std::string, std::string> values;
  CLI::App* app = nullptr;

  void attach(CLI::App* sub) {
    app = sub;
    sub->add_option("--config", config, "Properties file (key=value lines)");
    sub->add_flag("--ci", ci, "Require an explicit --seed");
    for (const auto& key : knownConfigKeys()) {
      values[key];
      sub->add_option("--" + key, values[key], "Overrides '" + key + "' from the config file");
    }
  }

  // Command-line flag > config file > default.
  Settings resolve() const {
    if (ci && app->count("--seed") == 0)
      throw ConfigError("--seed is required with --ci");
    Properties props;
    if (!config.empty()) props = readProperties(config);
    for (const auto& [key, value] : values)
      if (app->count("--" + key) > 0) props[key] = value;
    return settingsFromProperties(props);
  }
};

void printReport(const std::string& label, const ExperimentReport& r) {
  std::cout << label << ": satisfied " << r.tally.satisfied << "/" << r.tally.trials << " (r="
            << text::formatFixed(r.satisfactionRate(), 6) << "), best objective "
            << text::formatNumber(r.bestObjective) << ", mean I/D/U "
            << text::formatNumber(r.meanFinalCosts.inefficiency) << " / "
            << text::formatNumber(r.meanFinalCosts.meanDiscomfort) << " / "
            << text::formatNumber(r.meanFinalCosts.unfairness) << "\n";
}

int cmdRun(const KeyFlags& flags) {
  const Settings s = flags.resolve();
  const Problem p = loadProblem(s);
  const ExperimentReport report = runExperiment(p.planSets, p.experiment);
  writeResults(report, s.outputDir);
  printReport("run", report);
  return 0;
}

int cmdSweepBeta(const KeyFlags& flags) {
  const Settings s = flags.resolve();
  const Problem p = loadProblem(s);
  const BehavioralShiftReport shift = behavioralShift(p.planSets, p.experiment);
  fs::create_directories(s.outputDir);
  text::writeFile(s.outputDir / "behavioral_shift.csv", formatBehavioralShift(shift));
  std::cout << "grid points " << shift.points.size() << ", mean shift "
            << text::formatNumber(shift.meanShift) << "\n";
  return 0;
}

int cmdSweepLevels(const KeyFlags& flags) {
  const Settings s = flags.resolve();
  Problem p = loadProblem(s);
  if (p.experiment.run.planEnv) {
    p.experiment.envelopeLevels.push_back(*p.experiment.run.planEnv);
    p.experiment.run.planEnv.reset();
  }
  const LevelSweepResult sweep = envelopeLevelSweep(p.planSets, p.experiment);
  fs::create_directories(s.outputDir);
  std::vector<SummaryRow> rows;
  for (std::size_t i = 0; i < sweep.levels.size(); ++i) {
    const auto& level = sweep.levels[i];
    const std::string label = "level" + std::to_string(i);
    const fs::path dir = s.outputDir / ("level_" + std::to_string(i));
    writeResults(level.report, dir, label);
    text::writeFile(dir / "envelope.csv", formatGlobalConstraints(level.envelope));
    rows.push_back(summarize(level.report, label));
    printReport(label, level.report);
  }
  if (sweep.medianSoftPlan)
    writeVector(sweep.medianSoftPlan->values, s.outputDir / "median_soft_plan.csv");
  text::writeFile(s.outputDir / "summary.csv", formatSummary(rows));
  return 0;
}

int cmdOracle(const KeyFlags& flags, std::uint64_t cap) {
  const Settings s = flags.resolve();
  const Problem p = loadProblem(s);
  const RunConfig& run = p.experiment.run;
  const OracleResult r =
      bruteForceOracle(p.planSets, run.weights, run.costSpec, run.planEnv ? &*run.planEnv : nullptr,
                       run.costEnv ? &*run.costEnv : nullptr, cap);
  auto joined = [](const auto& xs, const char* sep, auto fmt) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + fmt(xs[i]);
    return out;
  };
  auto idx = [](std::size_t x) { return std::to_string(x); };
  std::cout << "combinations " << r.combinations << "\n"
            << "feasible " << r.feasibleCount() << "\n"
            << "optimum " << text::formatNumber(r.optimalObjective) << "\n"
            << "selections " << joined(r.optimalSelections, " ", idx) << "\n"
            << "global " << joined(r.optimalGlobal.values, ",", text::formatNumber) << "\n";
  if (r.feasibleOptimum)
    std::cout << "feasibleOptimum " << text::formatNumber(*r.feasibleOptimum) << "\n"
              << "feasibleSelections " << joined(r.feasibleSelections, " ", idx) << "\n";
  return 0;
}

struct GenerateFlags {
  std::string kind;
  std::uint64_t seed = 0;
  std::string out;
  std::size_t numAgents = 0, numPlans = 0, planSize = 0;
};

int cmdGenerate(const GenerateFlags& g) {
  const ScenarioKind kind = parseScenarioKind(g.kind);
  ScenarioSpec spec = ScenarioSpec::defaults(kind);
  spec.seed = g.seed;
  if (g.numAgents) spec.numAgents = g.numAgents;
  if (g.numPlans) spec.minPlans = spec.maxPlans = g.numPlans;
  if (g.planSize) spec.planSize = g.planSize;
  const Scenario s = generateScenario(spec);
  const fs::path dir = g.out.empty() ? fs::path("datasets") / scenarioName(kind) : fs::path(g.out);
  writePlanSets(s.planSets, dir);
  if (s.costSpec.target) writeVector(*s.costSpec.target, dir / "target.csv");
  std::cout << "wrote " << s.planSets.size() << " agents to " << dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized plan selection under hard constraints"};
  app.require_subcommand(1);

  KeyFlags runFlags, betaFlags, levelFlags, oracleFlags;
  runFlags.attach(app.add_subcommand("run", "Run repetitions and write trajectory/summary CSVs"));
  betaFlags.attach(app.add_subcommand("sweep-beta", "Behavioral-shift analysis over a beta grid"));
  levelFlags.attach(
      app.add_subcommand("sweep-levels", "Satisfaction rate across envelope levels"));
  auto* oracle = app.add_subcommand("oracle", "Brute-force optimum of a small instance");
  oracleFlags.attach(oracle);
  std::uint64_t cap = kDefaultOracleCap;
  oracle->add_option("--cap", cap, "Maximum number of combinations to enumerate");

  GenerateFlags gen;
  auto* generate = app.add_subcommand("generate", "Write a synthetic plan-set directory");
  generate->add_option("--kind", gen.kind, "energy, bike or uav")->required();
  generate->add_option("--seed", gen.seed, "Generator seed")->required();
  generate->add_option("--out", gen.out, "Output directory");
  generate->add_option("--numAgents", gen.numAgents);
  generate->add_option("--numPlans", gen.numPlans);
  generate->add_option("--planSize", gen.planSize);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (app.got_subcommand("run")) return cmdRun(runFlags);
    if (app.got_subcommand("sweep-beta")) return cmdSweepBeta(betaFlags);
    if (app.got_subcommand("sweep-levels")) return cmdSweepLevels(levelFlags);
    if (app.got_subcommand("oracle")) return cmdOracle(oracleFlags, cap);
    if (app.got_subcommand("generate")) return cmdGenerate(gen);
  } catch (const colearn::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
