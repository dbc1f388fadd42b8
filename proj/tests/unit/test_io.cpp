#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "colearn/constraint_io.hpp"
#include "colearn/plan_io.hpp"
#include "colearn/results_io.hpp"
#include "colearn/scenario.hpp"
#include "colearn/text.hpp"
#include "test_support.hpp"

using namespace colearn;
namespace fs = std::filesystem;
using colearn::testing::scratchDir;

TEST(Text, NumbersRoundTrip) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = d(rng) / (1 + rng() % 1000);
    EXPECT_EQ(text::parseNumber(text::formatNumber(x), "x"), x);
  }
  EXPECT_EQ(text::formatNumber(10.0), "10");
  EXPECT_EQ(text::formatNumber(0.1), "0.1");
  EXPECT_EQ(text::formatFixed(2.0 / 3.0, 6), "0.666667");
}

TEST(Text, ParseErrors) {
  EXPECT_EQ(text::parseNumber(" +2.5 ", "x"), 2.5);
  EXPECT_THROW(text::parseNumber("", "x"), ParseError);
  EXPECT_THROW(text::parseNumber("1.5abc", "x"), ParseError);
  EXPECT_THROW(text::parseNumber("inf", "x"), ParseError);
  EXPECT_THROW(text::parseNumber("nan", "x"), ParseError);
  EXPECT_THROW(text::parseCount("-1", "x"), ParseError);
  EXPECT_THROW(text::parseCount("1.0", "x"), ParseError);
  EXPECT_THROW(text::readLines("/nonexistent/colearn/file"), IoError);
}

TEST(PlanIo, LoadsFixtureDirectory) {
  const auto ps = loadPlanSets(fs::path(COLEARN_FIXTURES) / "table2");
  const auto expected = colearn::testing::table2PlanSets();
  ASSERT_EQ(ps.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(ps[i].agentId, i);
    ASSERT_EQ(ps[i].size(), 2u);
    for (std::size_t j = 0; j < 2; ++j) {
      EXPECT_EQ(ps[i][j].values, expected[i][j].values);
      EXPECT_EQ(ps[i][j].discomfort, expected[i][j].discomfort);
    }
  }
}

TEST(PlanIo, ParseLine) {
  const auto p = parsePlanLine("0.5:1,2.25,3", "here");
  EXPECT_EQ(p.discomfort, 0.5);
  EXPECT_EQ(p.values, (std::vector<double>{1, 2.25, 3}));
  EXPECT_THROW(parsePlanLine("1,2,3", "here"), ParseError);
  EXPECT_THROW(parsePlanLine("-1:1,2", "here"), ParseError);
  EXPECT_THROW(parsePlanLine("1:1,,2", "here"), ParseError);
}

TEST(PlanIo, OrdersAgentsNumerically) {
  const auto dir = scratchDir("order");
  text::writeFile(dir / "agent_10.plans", "0:10\n");
  text::writeFile(dir / "agent_2.plans", "0:2\n");
  text::writeFile(dir / "agent_1.plans", "0:1\n");
  text::writeFile(dir / "notes.txt", "ignored\n");
  const auto ps = loadPlanSets(dir);
  ASSERT_EQ(ps.size(), 3u);
  EXPECT_EQ(ps[0][0].values[0], 1.0);
  EXPECT_EQ(ps[1][0].values[0], 2.0);
  EXPECT_EQ(ps[2][0].values[0], 10.0);
}

TEST(PlanIo, Errors) {
  EXPECT_THROW(loadPlanSets("/nonexistent/colearn/dir"), IoError);
  auto dir = scratchDir("empty");
  EXPECT_THROW(loadPlanSets(dir), ParseError);
  text::writeFile(dir / "agent_0.plans", "# only a comment\n");
  EXPECT_THROW(loadPlanSets(dir), ParseError);

  dir = scratchDir("mismatch");
  text::writeFile(dir / "agent_0.plans", "0:1,2\n");
  text::writeFile(dir / "agent_1.plans", "0:1,2\n1:1,2,3\n");
  try {
    loadPlanSets(dir);
    FAIL() << "expected a dimension error";
  } catch (const DimensionError& e) {
    EXPECT_NE(std::string(e.what()).find("agent_1.plans:2"), std::string::npos) << e.what();
  }

  dir = scratchDir("dup");
  text::writeFile(dir / "agent_1.plans", "0:1\n");
  text::writeFile(dir / "agent_01.plans", "0:1\n");
  EXPECT_THROW(loadPlanSets(dir), ParseError);
}

TEST(PlanIo, GeneratedScenariosRoundTrip) {
  for (auto kind : {ScenarioKind::EnergyLike, ScenarioKind::BikeLike, ScenarioKind::UavLike}) {
    ScenarioSpec spec = ScenarioSpec::defaults(kind);
    spec.numAgents = 15;
    spec.seed = 3;
    const auto s = generateScenario(spec);
    const auto dir = scratchDir(std::string("roundtrip_") + scenarioName(kind));
    writePlanSets(s.planSets, dir);
    const auto back = loadPlanSets(dir);
    ASSERT_EQ(back.size(), s.planSets.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
      ASSERT_EQ(back[i].size(), s.planSets[i].size());
      for (std::size_t j = 0; j < back[i].size(); ++j) {
        EXPECT_EQ(back[i][j].values, s.planSets[i][j].values);
        EXPECT_EQ(back[i][j].discomfort, s.planSets[i][j].discomfort);
      }
    }
    if (s.costSpec.target) {
      writeVector(*s.costSpec.target, dir / "target.csv");
      EXPECT_EQ(loadVector(dir / "target.csv"), *s.costSpec.target);
    }
  }
}

TEST(ConstraintIo, GlobalConstraints) {
  const auto dir = scratchDir("global");
  text::writeFile(dir / "g.csv", "# bounds\n0,LEQ,9\n\n1,GEQ,2.5\n1,LEQ,13\n");
  const auto env = parseGlobalConstraints(dir / "g.csv", 2);
  EXPECT_EQ(env.upper()[0], 9.0);
  EXPECT_FALSE(env.lower()[0].has_value());
  EXPECT_EQ(env.lower()[1], 2.5);
  EXPECT_EQ(env.upper()[1], 13.0);
  text::writeFile(dir / "round.csv", formatGlobalConstraints(env));
  EXPECT_EQ(parseGlobalConstraints(dir / "round.csv", 2), env);
}

TEST(ConstraintIo, GlobalConstraintErrors) {
  const auto dir = scratchDir("global_err");
  auto expectParseError = [&](const std::string& body) {
    text::writeFile(dir / "g.csv", body);
    EXPECT_THROW(parseGlobalConstraints(dir / "g.csv", 2), ParseError) << body;
  };
  expectParseError("2,LEQ,1\n");
  expectParseError("0,LT,1\n");
  expectParseError("0,LEQ\n");
  expectParseError("0,LEQ,1\n0,LEQ,2\n");
  expectParseError("0,LEQ,1\n0,GEQ,2\n");
  expectParseError("x,LEQ,1\n");
  expectParseError("0,LEQ,abc\n");
}

TEST(ConstraintIo, CostConstraints) {
  const auto dir = scratchDir("cost");
  text::writeFile(dir / "c.csv", "DISCOMFORT,LEQ,0.5\nINEFFICIENCY,GEQ,1\nUNFAIRNESS,LEQ,0.1\n");
  const auto env = parseCostConstraints(dir / "c.csv");
  EXPECT_EQ(env.meanDiscomfort().upper, 0.5);
  EXPECT_EQ(env.inefficiency().lower, 1.0);
  EXPECT_EQ(env.unfairness().upper, 0.1);
  text::writeFile(dir / "round.csv", formatCostConstraints(env));
  EXPECT_EQ(parseCostConstraints(dir / "round.csv"), env);

  text::writeFile(dir / "bad.csv", "COMFORT,LEQ,1\n");
  EXPECT_THROW(parseCostConstraints(dir / "bad.csv"), ParseError);
  text::writeFile(dir / "bad.csv", "DISCOMFORT,LEQ,1\nDISCOMFORT,LEQ,2\n");
  EXPECT_THROW(parseCostConstraints(dir / "bad.csv"), ParseError);
  text::writeFile(dir / "bad.csv", "DISCOMFORT,LEQ,1\nDISCOMFORT,GEQ,2\n");
  EXPECT_THROW(parseCostConstraints(dir / "bad.csv"), ParseError);
}

TEST(ConstraintIo, AbsentFilesLeaveEnvelopesInactive) {
  const auto [env, cost] = parseConstraintFiles(std::nullopt, std::nullopt, 4);
  EXPECT_EQ(env.dimension(), 4u);
  EXPECT_FALSE(env.isActive());
  EXPECT_FALSE(cost.isActive());
}

TEST(ResultsIo, CsvRoundTrip) {
  const auto ps = colearn::testing::table2PlanSets();
  ExperimentSpec spec;
  spec.repetitions = 3;
  spec.run.iterations = 4;
  spec.run.planEnv = colearn::testing::upperEnvelope(10, 13);
  const auto report = runExperiment(ps, spec);
  const auto dir = scratchDir("results");
  writeResults(report, dir, "case4");

  const auto rows = readTrajectory(dir / "trajectory.csv");
  EXPECT_EQ(rows, trajectoryRows(report));
  EXPECT_EQ(rows.size(), 12u);
  const auto summary = readSummary(dir / "summary.csv");
  ASSERT_EQ(summary.size(), 1u);
  EXPECT_EQ(summary[0].label, "case4");
  EXPECT_EQ(summary[0].satisfied, report.tally.satisfied);
  EXPECT_EQ(summary[0].trials, 3u);
  EXPECT_EQ(summary[0].meanCosts, report.meanFinalCosts);
  EXPECT_EQ(loadVector(dir / "global_plan.csv"), report.best().globalPlan.values);
  EXPECT_EQ(formatTrajectory(rows), formatTrajectory(trajectoryRows(report)));
}

TEST(ResultsIo, RejectsMalformedCsv) {
  const auto dir = scratchDir("results_bad");
  text::writeFile(dir / "t.csv", "wrong,header\n");
  EXPECT_THROW(readTrajectory(dir / "t.csv"), ParseError);
  text::writeFile(dir / "t.csv", std::string(kTrajectoryHeader) + "\n0,1,0,0,0,2,0\n");
  EXPECT_THROW(readTrajectory(dir / "t.csv"), ParseError);
  text::writeFile(dir / "t.csv", std::string(kTrajectoryHeader) + "\n0,1,0,0\n");
  EXPECT_THROW(readTrajectory(dir / "t.csv"), ParseError);
  text::writeFile(dir / "s.csv", std::string(kSummaryHeader) + "\nx,abc,1,1,0,0,0,0\n");
  EXPECT_THROW(readSummary(dir / "s.csv"), ParseError);
}

TEST(Scenario, GeneratorsAreDeterministicAndShaped) {
  for (auto kind : {ScenarioKind::EnergyLike, ScenarioKind::BikeLike, ScenarioKind::UavLike}) {
    ScenarioSpec spec = ScenarioSpec::defaults(kind);
    spec.numAgents = 20;
    spec.seed = 9;
    const auto a = generateScenario(spec), b = generateScenario(spec);
    EXPECT_EQ(validatePlanSets(a.planSets), spec.planSize);
    ASSERT_EQ(a.planSets.size(), 20u);
    for (std::size_t i = 0; i < 20; ++i) {
      EXPECT_GE(a.planSets[i].size(), spec.minPlans);
      EXPECT_LE(a.planSets[i].size(), spec.maxPlans);
      EXPECT_EQ(a.planSets[i].plans.front().values, b.planSets[i].plans.front().values);
    }
    EXPECT_EQ(a.costSpec.kind == CostKind::Rmse, kind == ScenarioKind::UavLike);
  }
  EXPECT_THROW(generateScenario(ScenarioSpec{ScenarioKind::File}), ConfigError);
  EXPECT_THROW(ScenarioSpec::defaults(ScenarioKind::File), ConfigError);
  EXPECT_EQ(parseScenarioKind("energy_like"), ScenarioKind::EnergyLike);
  EXPECT_EQ(parseScenarioKind("UAV"), ScenarioKind::UavLike);
  EXPECT_THROW(parseScenarioKind("boat"), ConfigError);
}
