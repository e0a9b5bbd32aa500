#pragma once

#include <charconv>
#include <cstdio>
#include <string>

namespace relpair {

/// Shortest decimal form of v that round-trips exactly (locale-free).
inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Fixed-point form with the given number of fractional digits, used where a
/// stable column width matters more than round-tripping (SVG coordinates).
inline std::string format_fixed(double v, int precision) {
  char buf[64];
  int n = std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return std::string(buf, buf + n);
}

}  // namespace relpair
