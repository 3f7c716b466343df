#pragma once

// Score extraction from raw model output. The accepted shape is the regex
//
//   (?i:similarity score)[ \t\r\n\f\v]*:[ \t\r\n\f\v]*([0-9]+(\.[0-9]+)?)
//
// searched leftmost-first. It is matched by a linear scanner rather than
// std::regex, whose backtracking executor recurses per input character and
// can exhaust the stack on long digit or whitespace runs.

#include <cstddef>
#include <optional>
#include <string_view>

#include "simrag/dataset.hpp"
#include "simrag/error.hpp"
#include "simrag/numeric_format.hpp"

namespace simrag {

struct ParsedScore {
  double value = 0.0;
  std::size_t match_begin = 0;  ///< offset of the marker phrase
  std::size_t match_end = 0;    ///< one past the last digit
};

namespace detail {

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}
inline bool is_digit(char c) { return c >= '0' && c <= '9'; }
inline char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : c; }

inline bool marker_at(std::string_view text, std::size_t pos) {
  constexpr std::string_view marker = "similarity score";
  if (text.size() - pos < marker.size()) return false;
  for (std::size_t i = 0; i < marker.size(); ++i) {
    if (ascii_lower(text[pos + i]) != marker[i]) return false;
  }
  return true;
}

struct NumberSpan {
  std::size_t begin, end;
};

/// Tries the full pattern anchored at `pos`.
inline std::optional<NumberSpan> match_at(std::string_view text, std::size_t pos) {
  if (!marker_at(text, pos)) return std::nullopt;
  std::size_t i = pos + 16;
  while (i < text.size() && is_space(text[i])) ++i;
  if (i >= text.size() || text[i] != ':') return std::nullopt;
  ++i;
  while (i < text.size() && is_space(text[i])) ++i;
  const std::size_t begin = i;
  while (i < text.size() && is_digit(text[i])) ++i;
  if (i == begin) return std::nullopt;
  if (i + 1 < text.size() && text[i] == '.' && is_digit(text[i + 1])) {
    i += 2;
    while (i < text.size() && is_digit(text[i])) ++i;
  }
  return NumberSpan{begin, i};
}

}  // namespace detail

/// Locate the first well-formed score. Throws NoMatch when the pattern is
/// absent and OutOfRange when the first match lies outside [0, 4].
inline ParsedScore parse_similarity(std::string_view raw) {
  for (std::size_t pos = 0; pos < raw.size(); ++pos) {
    const auto span = detail::match_at(raw, pos);
    if (!span) continue;
    // The span is digits[.digits], always accepted by parse_decimal.
    const double value = *parse_decimal(raw.substr(span->begin, span->end - span->begin));
    if (value < kMinScore || value > kMaxScore) throw OutOfRange(value);
    return ParsedScore{value, pos, span->end};
  }
  throw NoMatch();
}

/// Non-throwing variant for callers that only need the value.
inline std::optional<double> try_parse_similarity(std::string_view raw) noexcept {
  try {
    return parse_similarity(raw).value;
  } catch (const ParseError&) {
    return std::nullopt;
  }
}

}  // namespace simrag
