#pragma once

// Constraint CSVs.
//
//   global constraints:  elementIndex,operator,value   e.g. 0,LEQ,9
//   cost constraints:    costName,operator,value       e.g. DISCOMFORT,LEQ,0.5
//
// LEQ is an upper bound, GEQ a lower bound. costName is one of INEFFICIENCY,
// DISCOMFORT, UNFAIRNESS. Blank lines and lines starting with '#' are ignored.

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <utility>

#include "colearn/error.hpp"
#include "colearn/hard_constraints.hpp"
#include "colearn/text.hpp"

namespace colearn {

enum class BoundOperator { Leq, Geq };

inline BoundOperator parseOperator(std::string_view s, const std::string& where) {
  if (s == "LEQ") return BoundOperator::Leq;
  if (s == "GEQ") return BoundOperator::Geq;
  throw ParseError(where + ": unknown operator '" + std::string(s) + "' (expected LEQ or GEQ)");
}

namespace detail {

template <class RowFn>
void forEachCsvRow(const std::filesystem::path& path, RowFn&& fn) {
  const auto lines = text::readLines(path);
  for (std::size_t l = 0; l < lines.size(); ++l) {
    const auto line = text::trim(lines[l]);
    if (line.empty() || line.front() == '#') continue;
    const std::string where = path.string() + ":" + std::to_string(l + 1);
    const auto fields = text::split(line, ',');
    if (fields.size() != 3) throw ParseError(where + ": expected 3 comma-separated fields");
    fn(fields, where);
  }
}

}  // namespace detail

inline ConstraintEnvelope parseGlobalConstraints(const std::filesystem::path& path, std::size_t m) {
  ConstraintEnvelope env(m);
  std::set<std::pair<std::uint64_t, BoundOperator>> seen;
  detail::forEachCsvRow(path, [&](const auto& f, const std::string& where) {
    const auto index = text::parseCount(f[0], where);
    if (index >= m)
      throw ParseError(where + ": element index " + std::to_string(index) +
                       " outside plan dimension " + std::to_string(m));
    const auto op = parseOperator(f[1], where);
    const double value = text::parseNumber(f[2], where);
    if (!seen.emplace(index, op).second)
      throw ParseError(where + ": duplicate bound for element " + std::to_string(index));
    try {
      if (op == BoundOperator::Leq)
        env.setUpper(index, value);
      else
        env.setLower(index, value);
    } catch (const ConfigError& e) {
      throw ParseError(where + ": " + e.what());
    }
  });
  return env;
}

inline CostEnvelope parseCostConstraints(const std::filesystem::path& path) {
  ScalarBounds bounds[3];
  std::set<std::pair<int, BoundOperator>> seen;
  detail::forEachCsvRow(path, [&](const auto& f, const std::string& where) {
    int which = -1;
    if (f[0] == "INEFFICIENCY") which = 0;
    else if (f[0] == "DISCOMFORT") which = 1;
    else if (f[0] == "UNFAIRNESS") which = 2;
    else throw ParseError(where + ": unknown cost name '" + std::string(f[0]) + "'");
    const auto op = parseOperator(f[1], where);
    const double value = text::parseNumber(f[2], where);
    if (!seen.emplace(which, op).second)
      throw ParseError(where + ": duplicate bound for " + std::string(f[0]));
    (op == BoundOperator::Leq ? bounds[which].upper : bounds[which].lower) = value;
  });
  try {
    return {bounds[0], bounds[1], bounds[2]};
  } catch (const ConfigError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

// Either path may be absent; absent files leave the envelope unconstrained.
inline std::pair<ConstraintEnvelope, CostEnvelope> parseConstraintFiles(
    const std::optional<std::filesystem::path>& globalPath,
    const std::optional<std::filesystem::path>& costPath, std::size_t m) {
  return {globalPath ? parseGlobalConstraints(*globalPath, m) : ConstraintEnvelope(m),
          costPath ? parseCostConstraints(*costPath) : CostEnvelope{}};
}

inline std::string formatGlobalConstraints(const ConstraintEnvelope& env) {
  std::string out;
  for (std::size_t u = 0; u < env.dimension(); ++u) {
    if (env.upper()[u])
      out += std::to_string(u) + ",LEQ," + text::formatNumber(*env.upper()[u]) + "\n";
    if (env.lower()[u])
      out += std::to_string(u) + ",GEQ," + text::formatNumber(*env.lower()[u]) + "\n";
  }
  return out;
}

inline std::string formatCostConstraints(const CostEnvelope& env) {
  std::string out;
  auto emit = [&](const char* name, const ScalarBounds& b) {
    if (b.upper) out += std::string(name) + ",LEQ," + text::formatNumber(*b.upper) + "\n";
    if (b.lower) out += std::string(name) + ",GEQ," + text::formatNumber(*b.lower) + "\n";
  };
  emit("INEFFICIENCY", env.inefficiency());
  emit("DISCOMFORT", env.meanDiscomfort());
  emit("UNFAIRNESS", env.unfairness());
  return out;
}

}  // namespace colearn
