#pragma once

// Result CSVs.
//
//   trajectory.csv   repetition,iteration,inefficiency,meanDiscomfort,unfairness,satisfied,objective
//   summary.csv      label,satisfactionRate,satisfied,trials,bestObjective,
//                    meanInefficiency,meanDiscomfort,meanUnfairness
//   global_plan.csv  best final global plan, one value per line
//   behavioral_shift.csv
//                    beta,softInefficiency,softDiscomfort,hardInefficiency,
//                    hardDiscomfort,hardSatisfactionRate,matchedBeta,shift
//
// Reals use the shortest round-trip form except satisfactionRate, which is
// fixed to 6 decimals. Output is a pure function of the report.

#include <filesystem>
#include <string>
#include <vector>

#include "colearn/error.hpp"
#include "colearn/experiment.hpp"
#include "colearn/plan_io.hpp"
#include "colearn/text.hpp"

namespace colearn {

struct ResultRow {
  std::size_t repetition = 0;
  std::size_t iteration = 0;
  double inefficiency = 0.0;
  double meanDiscomfort = 0.0;
  double unfairness = 0.0;
  bool satisfied = true;
  double objective = 0.0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

struct SummaryRow {
  std::string label;
  double satisfactionRate = 0.0;
  std::size_t satisfied = 0;
  std::size_t trials = 0;
  double bestObjective = 0.0;
  CostTriple meanCosts;
};

inline constexpr const char* kTrajectoryHeader =
    "repetition,iteration,inefficiency,meanDiscomfort,unfairness,satisfied,objective";
inline constexpr const char* kSummaryHeader =
    "label,satisfactionRate,satisfied,trials,bestObjective,meanInefficiency,meanDiscomfort,"
    "meanUnfairness";
inline constexpr const char* kShiftHeader =
    "beta,softInefficiency,softDiscomfort,hardInefficiency,hardDiscomfort,hardSatisfactionRate,"
    "matchedBeta,shift";

inline std::vector<ResultRow> trajectoryRows(const ExperimentReport& report) {
  std::vector<ResultRow> rows;
  for (std::size_t j = 0; j < report.repetitions.size(); ++j) {
    const auto& traj = report.repetitions[j].trajectory;
    for (std::size_t t = 0; t < traj.size(); ++t)
      rows.push_back({j, t + 1, traj[t].costs.inefficiency, traj[t].costs.meanDiscomfort,
                      traj[t].costs.unfairness, traj[t].satisfied, traj[t].objective});
  }
  return rows;
}

inline SummaryRow summarize(const ExperimentReport& report, std::string label) {
  return {std::move(label), report.satisfactionRate(), report.tally.satisfied,
          report.tally.trials,  report.bestObjective,      report.meanFinalCosts};
}

inline std::string formatTrajectory(const std::vector<ResultRow>& rows) {
  std::string out = std::string(kTrajectoryHeader) + "\n";
  for (const auto& r : rows) {
    out += std::to_string(r.repetition) + "," + std::to_string(r.iteration) + "," +
           text::formatNumber(r.inefficiency) + "," + text::formatNumber(r.meanDiscomfort) + "," +
           text::formatNumber(r.unfairness) + "," + (r.satisfied ? "1" : "0") + "," +
           text::formatNumber(r.objective) + "\n";
  }
  return out;
}

inline std::string formatSummary(const std::vector<SummaryRow>& rows) {
  std::string out = std::string(kSummaryHeader) + "\n";
  for (const auto& r : rows) {
    out += r.label + "," + text::formatFixed(r.satisfactionRate, 6) + "," +
           std::to_string(r.satisfied) + "," + std::to_string(r.trials) + "," +
           text::formatNumber(r.bestObjective) + "," + text::formatNumber(r.meanCosts.inefficiency) +
           "," + text::formatNumber(r.meanCosts.meanDiscomfort) + "," +
           text::formatNumber(r.meanCosts.unfairness) + "\n";
  }
  return out;
}

inline std::string formatBehavioralShift(const BehavioralShiftReport& report) {
  std::string out = std::string(kShiftHeader) + "\n";
  for (const auto& p : report.points) {
    out += text::formatNumber(p.beta) + "," + text::formatNumber(p.soft.inefficiency) + "," +
           text::formatNumber(p.soft.meanDiscomfort) + "," +
           text::formatNumber(p.hard.inefficiency) + "," +
           text::formatNumber(p.hard.meanDiscomfort) + "," +
           text::formatFixed(p.hardSatisfactionRate, 6) + "," + text::formatNumber(p.matchedBeta) +
           "," + text::formatNumber(p.shift) + "\n";
  }
  return out;
}

inline void writeResults(const ExperimentReport& report, const std::filesystem::path& outputDir,
                         const std::string& label = "run") {
  try {
    std::filesystem::create_directories(outputDir);
  } catch (const std::filesystem::filesystem_error& e) {
    throw IoError("cannot create " + outputDir.string() + ": " + e.what());
  }
  text::writeFile(outputDir / "trajectory.csv", formatTrajectory(trajectoryRows(report)));
  text::writeFile(outputDir / "summary.csv", formatSummary({summarize(report, label)}));
  writeVector(report.best().globalPlan.values, outputDir / "global_plan.csv");
}

namespace detail {

inline std::vector<std::vector<std::string_view>> csvBody(const std::vector<std::string>& lines,
                                                          const char* header,
                                                          const std::string& source) {
  if (lines.empty() || text::trim(lines.front()) != header)
    throw ParseError(source + ": unexpected header");
  const auto columns = text::split(header, ',').size();
  std::vector<std::vector<std::string_view>> rows;
  for (std::size_t l = 1; l < lines.size(); ++l) {
    if (text::trim(lines[l]).empty()) continue;
    auto fields = text::split(lines[l], ',');
    if (fields.size() != columns)
      throw ParseError(source + ":" + std::to_string(l + 1) + ": expected " +
                       std::to_string(columns) + " fields");
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace detail

inline std::vector<ResultRow> readTrajectory(const std::filesystem::path& path) {
  const auto lines = text::readLines(path);
  std::vector<ResultRow> rows;
  const std::string src = path.string();
  for (const auto& f : detail::csvBody(lines, kTrajectoryHeader, src)) {
    if (f[5] != "0" && f[5] != "1") throw ParseError(src + ": satisfied must be 0 or 1");
    rows.push_back({static_cast<std::size_t>(text::parseCount(f[0], src)),
                    static_cast<std::size_t>(text::parseCount(f[1], src)),
                    text::parseNumber(f[2], src), text::parseNumber(f[3], src),
                    text::parseNumber(f[4], src), f[5] == "1", text::parseNumber(f[6], src)});
  }
  return rows;
}

inline std::vector<SummaryRow> readSummary(const std::filesystem::path& path) {
  const auto lines = text::readLines(path);
  std::vector<SummaryRow> rows;
  const std::string src = path.string();
  for (const auto& f : detail::csvBody(lines, kSummaryHeader, src)) {
    rows.push_back({std::string(f[0]),
                    text::parseNumber(f[1], src),
                    static_cast<std::size_t>(text::parseCount(f[2], src)),
                    static_cast<std::size_t>(text::parseCount(f[3], src)),
                    text::parseNumber(f[4], src),
                    {text::parseNumber(f[5], src), text::parseNumber(f[6], src),
                     text::parseNumber(f[7], src)}});
  }
  return rows;
}

}  // namespace colearn
