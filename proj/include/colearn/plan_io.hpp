#pragma once

// Plan-set directories: one file per agent named agent_<i>.plans, one plan
// per line as `discomfort:v1,v2,...,vm`. Agents are ordered by the integer
// in the file name.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <map>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "colearn/error.hpp"
#include "colearn/plan_model.hpp"
#include "colearn/text.hpp"

namespace colearn {

namespace detail {

inline std::optional<std::uint64_t> trailingIndex(const std::string& stem) {
  auto end = stem.find_last_of("0123456789");
  if (end == std::string::npos) return std::nullopt;
  auto begin = end;
  while (begin > 0 && std::isdigit(static_cast<unsigned char>(stem[begin - 1]))) --begin;
  return text::parseCount(std::string_view(stem).substr(begin, end - begin + 1), stem);
}

}  // namespace detail

inline Plan parsePlanLine(std::string_view line, const std::string& where) {
  const auto colon = line.find(':');
  if (colon == std::string_view::npos) throw ParseError(where + ": expected 'score:v1,...,vm'");
  Plan p;
  p.discomfort = text::parseNumber(line.substr(0, colon), where);
  if (p.discomfort < 0.0) throw ParseError(where + ": negative discomfort score");
  for (auto field : text::split(line.substr(colon + 1), ','))
    p.values.push_back(text::parseNumber(field, where));
  return p;
}

inline std::vector<PlanSet> loadPlanSets(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw IoError("plan directory not found: " + dir.string());

  std::map<std::uint64_t, fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".plans") continue;
    const auto stem = entry.path().stem().string();
    const auto index = detail::trailingIndex(stem);
    if (!index) throw ParseError(entry.path().string() + ": file name carries no agent index");
    if (!files.emplace(*index, entry.path()).second)
      throw ParseError(entry.path().string() + ": duplicate agent index " + std::to_string(*index));
  }
  if (files.empty()) throw ParseError("no .plans files in " + dir.string());

  std::vector<PlanSet> planSets;
  std::optional<std::size_t> m;
  for (const auto& [index, path] : files) {
    PlanSet ps;
    ps.agentId = planSets.size();
    const auto lines = text::readLines(path);
    for (std::size_t l = 0; l < lines.size(); ++l) {
      const auto line = text::trim(lines[l]);
      if (line.empty() || line.front() == '#') continue;
      const std::string where = path.string() + ":" + std::to_string(l + 1);
      Plan p = parsePlanLine(line, where);
      if (!m) m = p.dimension();
      if (p.dimension() != *m)
        throw DimensionError(where + ": plan has " + std::to_string(p.dimension()) +
                             " values, expected " + std::to_string(*m));
      ps.plans.push_back(std::move(p));
    }
    if (ps.plans.empty()) throw ParseError(path.string() + ": no plans");
    planSets.push_back(std::move(ps));
  }
  return planSets;
}

inline void writePlanSets(std::span<const PlanSet> planSets, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < planSets.size(); ++i) {
    std::string out;
    for (const auto& p : planSets[i].plans) {
      out += text::formatNumber(p.discomfort);
      out += ':';
      for (std::size_t u = 0; u < p.values.size(); ++u) {
        if (u) out += ',';
        out += text::formatNumber(p.values[u]);
      }
      out += '\n';
    }
    text::writeFile(dir / ("agent_" + std::to_string(i) + ".plans"), out);
  }
}

// One value per line (RMSE targets, global plans).
inline std::vector<double> loadVector(const std::filesystem::path& path) {
  std::vector<double> v;
  const auto lines = text::readLines(path);
  for (std::size_t l = 0; l < lines.size(); ++l) {
    const auto line = text::trim(lines[l]);
    if (line.empty() || line.front() == '#') continue;
    v.push_back(text::parseNumber(line, path.string() + ":" + std::to_string(l + 1)));
  }
  return v;
}

inline void writeVector(std::span<const double> v, const std::filesystem::path& path) {
  std::string out;
  for (double x : v) {
    out += text::formatNumber(x);
    out += '\n';
  }
  text::writeFile(path, out);
}

}  // namespace colearn
