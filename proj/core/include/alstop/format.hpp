#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>

#include "alstop/errors.hpp"

namespace alstop {

// Shortest decimal form that parses back to the same double. Keeps curve
// logs and CSV output byte-stable and lossless under re-aggregation.
inline std::string format_double(double value) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text) {
  double v{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw IoError("bad floating-point field: '" + std::string(text) + "'");
  }
  return v;
}

inline long long parse_int(std::string_view text) {
  long long v{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw IoError("bad integer field: '" + std::string(text) + "'");
  }
  return v;
}

inline std::uint64_t parse_uint64(std::string_view text) {
  std::uint64_t v{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw IoError("bad unsigned integer field: '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace alstop
