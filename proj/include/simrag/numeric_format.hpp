#pragma once

#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>

namespace simrag {

/// Shortest decimal text that round-trips to `value`: 2.2 -> "2.2",
/// 4.0 -> "4". Always uses '.' regardless of the global locale.
inline std::string format_decimal(double value) {
  if (value == 0.0) return "0";  // also folds -0
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed);
  if (ec != std::errc{}) {
    end = std::to_chars(buf, buf + sizeof buf, value).ptr;
  }
  return std::string(buf, end);
}

/// Strict fixed-notation decimal: digits with an optional '.' fraction.
/// No sign, exponent, whitespace or locale separators. nullopt otherwise.
inline std::optional<double> parse_decimal(std::string_view text) {
  if (text.empty()) return std::nullopt;
  bool seen_dot = false;
  bool seen_digit = false;
  for (char c : text) {
    if (c >= '0' && c <= '9') {
      seen_digit = true;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else {
      return std::nullopt;
    }
  }
  if (!seen_digit) return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value,
                                   std::chars_format::fixed);
  if (ptr != text.data() + text.size()) return std::nullopt;
  if (ec == std::errc::result_out_of_range) {
    // Overflow when the integral part is nonzero, underflow otherwise.
    for (char c : text) {
      if (c == '.') break;
      if (c != '0') return HUGE_VAL;
    }
    return 0.0;
  }
  if (ec != std::errc{}) return std::nullopt;
  return value;
}

}  // namespace simrag
