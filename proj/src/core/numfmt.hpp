#pragma once

#include <charconv>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace zeroday {

// Shortest decimal form that parses back to the identical double.
inline std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Strict numeric parse: optional sign, decimal/scientific, inf/nan
// spellings. Leading '+' and surrounding ASCII whitespace are tolerated;
// anything else must consume the whole token.
inline std::optional<double> parse_double(std::string_view s) {
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    return std::nullopt;
  }
  return v;
}

// Rate in [0,1] -> percentage with two decimals ("98.15").
inline std::string format_percent(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", rate * 100.0);
  return std::string(buf);
}

// Rounds a rate to the two-decimal percentage grid, as a percent value.
inline double round_percent(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", rate * 100.0);
  return std::strtod(buf, nullptr);
}

}  // namespace zeroday
