#pragma once

// Sentence-pair corpus: loading, validation and the canonical TSV layout.
//
// Single-file layout (header required):
//   sentence1<TAB>sentence2<TAB>score<TAB>split      split in {train, validation, test}
// Pre-split layout: a directory holding train.tsv, validation.tsv, test.tsv,
// each with the header sentence1<TAB>sentence2<TAB>score.
//
// Pair ids are 0-based positions in the concatenated row order (train rows,
// then validation, then test for pre-split input; file order for single-file
// input), so they are unique across splits and increase with file order.

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "simrag/error.hpp"
#include "simrag/numeric_format.hpp"
#include "simrag/random.hpp"

namespace simrag {

inline constexpr double kMinScore = 0.0;
inline constexpr double kMaxScore = 4.0;

struct SentencePair {
  int id = 0;
  std::string sentence1;
  std::string sentence2;
  double reference_score = 0.0;

  friend bool operator==(const SentencePair&, const SentencePair&) = default;
};

enum class Split { train, validation, test };

inline constexpr std::array<Split, 3> kAllSplits{Split::train, Split::validation, Split::test};

inline std::string_view to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::validation: return "validation";
    case Split::test: return "test";
  }
  return "?";
}

struct Dataset {
  std::vector<SentencePair> train;
  std::vector<SentencePair> validation;
  std::vector<SentencePair> test;

  const std::vector<SentencePair>& split(Split s) const {
    switch (s) {
      case Split::train: return train;
      case Split::validation: return validation;
      case Split::test: return test;
    }
    return test;
  }
  std::vector<SentencePair>& split(Split s) {
    return const_cast<std::vector<SentencePair>&>(std::as_const(*this).split(s));
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

enum class DatasetFormat { single_file, pre_split };

struct SplitCounts {
  std::size_t train = 0;
  std::size_t validation = 0;
  std::size_t test = 0;
  bool canonical = false;
  std::string warning;  ///< empty when the counts are the canonical 64/16/20
};

namespace detail {

inline std::string trim_copy(std::string_view s) {
  const auto* ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFile(path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto pos = text.find('\n', start);
    if (pos == std::string_view::npos) pos = text.size();
    auto line = text.substr(start, pos - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = pos + 1;
  }
  return lines;
}

inline SentencePair parse_pair_fields(std::string_view s1, std::string_view s2,
                                      std::string_view score_text, const std::string& file,
                                      std::size_t line_no) {
  if (trim_copy(s1).empty()) throw MalformedRow(file, line_no, "sentence1 is empty");
  if (trim_copy(s2).empty()) throw MalformedRow(file, line_no, "sentence2 is empty");
  const auto score = parse_decimal(trim_copy(score_text));
  if (!score) {
    throw MalformedRow(file, line_no, "unparsable score '" + std::string(score_text) + "'");
  }
  if (*score < kMinScore || *score > kMaxScore) {
    throw MalformedRow(file, line_no,
                       "score " + std::string(score_text) + " outside [0, 4]");
  }
  return SentencePair{0, std::string(s1), std::string(s2), *score};
}

inline void expect_header(std::string_view line, std::string_view expected,
                          const std::string& file) {
  if (line != expected) {
    throw MalformedRow(file, 1,
                       "header must be '" + std::string(expected) + "' (tab-separated)");
  }
}

inline constexpr std::string_view kSingleFileHeader = "sentence1\tsentence2\tscore\tsplit";
inline constexpr std::string_view kPreSplitHeader = "sentence1\tsentence2\tscore";

inline Split parse_split(std::string_view text, const std::string& file, std::size_t line_no) {
  for (Split s : kAllSplits) {
    if (text == to_string(s)) return s;
  }
  throw MalformedRow(file, line_no, "unknown split '" + std::string(text) + "'");
}

inline void assign_ids_and_check(Dataset& ds) {
  int next = 0;
  for (Split s : kAllSplits) {
    for (auto& p : ds.split(s)) p.id = next++;
  }
  for (Split s : kAllSplits) {
    if (ds.split(s).empty()) throw EmptySplit(std::string(to_string(s)));
  }
}

}  // namespace detail

/// Parse single-file TSV content. `origin` names the source in diagnostics.
inline Dataset parse_single_file(std::string_view text, const std::string& origin = "<memory>") {
  const auto lines = detail::split_lines(text);
  if (lines.empty()) throw MalformedRow(origin, 1, "file is empty");
  detail::expect_header(lines.front(), detail::kSingleFileHeader, origin);

  Dataset ds;
  int next_id = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto line = lines[i];
    if (line.empty()) continue;
    const auto fields = detail::split_tabs(line);
    if (fields.size() != 4) {
      throw MalformedRow(origin, i + 1,
                         "expected 4 tab-separated columns, found " +
                             std::to_string(fields.size()));
    }
    auto pair = detail::parse_pair_fields(fields[0], fields[1], fields[2], origin, i + 1);
    pair.id = next_id++;
    ds.split(detail::parse_split(fields[3], origin, i + 1)).push_back(std::move(pair));
  }
  for (Split s : kAllSplits) {
    if (ds.split(s).empty()) throw EmptySplit(std::string(to_string(s)));
  }
  return ds;
}

inline std::vector<SentencePair> parse_split_file(std::string_view text,
                                                  const std::string& origin) {
  const auto lines = detail::split_lines(text);
  if (lines.empty()) throw MalformedRow(origin, 1, "file is empty");
  detail::expect_header(lines.front(), detail::kPreSplitHeader, origin);
  std::vector<SentencePair> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = detail::split_tabs(lines[i]);
    if (fields.size() != 3) {
      throw MalformedRow(origin, i + 1,
                         "expected 3 tab-separated columns, found " +
                             std::to_string(fields.size()));
    }
    rows.push_back(detail::parse_pair_fields(fields[0], fields[1], fields[2], origin, i + 1));
  }
  return rows;
}

/// Load a dataset. For `pre_split`, `path` is the directory holding the
/// three split files.
inline Dataset load_dataset(const std::filesystem::path& path,
                            DatasetFormat format = DatasetFormat::single_file) {
  if (format == DatasetFormat::single_file) {
    if (!std::filesystem::is_regular_file(path)) throw MissingFile(path.string());
    return parse_single_file(detail::read_file(path), path.string());
  }
  Dataset ds;
  for (Split s : kAllSplits) {
    const auto file = path / (std::string(to_string(s)) + ".tsv");
    if (!std::filesystem::is_regular_file(file)) throw MissingFile(file.string());
    ds.split(s) = parse_split_file(detail::read_file(file), file.string());
  }
  detail::assign_ids_and_check(ds);
  return ds;
}

inline SplitCounts validate_counts(const Dataset& ds) {
  SplitCounts c{ds.train.size(), ds.validation.size(), ds.test.size(), false, {}};
  c.canonical = c.train == 64 && c.validation == 16 && c.test == 20;
  if (!c.canonical) {
    c.warning = "non-canonical split sizes " + std::to_string(c.train) + "/" +
                std::to_string(c.validation) + "/" + std::to_string(c.test) +
                " (BIOSSES uses 64/16/20)";
  }
  return c;
}

/// Single-file TSV text; reparses to a field-equal Dataset.
inline std::string serialize_single_file(const Dataset& ds) {
  std::vector<std::pair<const SentencePair*, Split>> rows;
  for (Split s : kAllSplits) {
    for (const auto& p : ds.split(s)) rows.emplace_back(&p, s);
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.first->id < b.first->id; });
  std::string out(detail::kSingleFileHeader);
  out += '\n';
  for (const auto& [p, s] : rows) {
    out += p->sentence1;
    out += '\t';
    out += p->sentence2;
    out += '\t';
    out += format_decimal(p->reference_score);
    out += '\t';
    out += to_string(s);
    out += '\n';
  }
  return out;
}

/// Content fingerprint used when addressing run outputs.
inline std::string dataset_fingerprint(const Dataset& ds) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(serialize_single_file(ds))));
  return buf;
}

}  // namespace simrag
