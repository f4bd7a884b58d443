#pragma once

#include <charconv>
#include <string>
#include <string_view>

namespace skinrig {

/// Shortest decimal text that parses back to exactly `v`.
inline std::string fmt_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace skinrig
