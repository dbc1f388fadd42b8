#pragma once

// Locale-independent number formatting and parsing shared by the file formats.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <filesystem>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "colearn/error.hpp"

namespace colearn::text {

// Shortest representation that parses back to the same double.
inline std::string formatNumber(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw IoError("cannot format number");
  return {buf, end};
}

inline std::string formatFixed(double x, int precision) {
  char buf[128];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, precision);
  if (ec != std::errc{}) throw IoError("cannot format number");
  return {buf, end};
}

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Parses a finite decimal real. `where` prefixes the error message.
inline double parseNumber(std::string_view s, const std::string& where) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(x))
    throw ParseError(where + ": invalid number '" + std::string(s) + "'");
  return x;
}

inline std::uint64_t parseCount(std::string_view s, const std::string& where) {
  s = trim(s);
  std::uint64_t x = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
    throw ParseError(where + ": invalid non-negative integer '" + std::string(s) + "'");
  return x;
}

inline std::vector<std::string> readLines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(std::move(line));
  return lines;
}

inline void writeFile(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace colearn::text
