#pragma once

// Classical string-similarity metrics, all normalised to [0, 1] and
// operating on bytes (UTF-8 code units).

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "simrag/dataset.hpp"
#include "simrag/error.hpp"
#include "simrag/stats.hpp"

namespace simrag {

enum class Metric { levenshtein, jaccard_tokens, qgram, cosine_qgram };
enum class Tokenizer { whitespace, lowercase_whitespace };

inline std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::levenshtein: return "levenshtein";
    case Metric::jaccard_tokens: return "jaccard_tokens";
    case Metric::qgram: return "qgram";
    case Metric::cosine_qgram: return "cosine_qgram";
  }
  return "?";
}

inline std::string_view to_string(Tokenizer t) {
  return t == Tokenizer::whitespace ? "whitespace" : "lowercase_whitespace";
}

inline Metric parse_metric(std::string_view s) {
  for (Metric m : {Metric::levenshtein, Metric::jaccard_tokens, Metric::qgram, Metric::cosine_qgram}) {
    if (s == to_string(m)) return m;
  }
  throw ConfigError("unknown metric '" + std::string(s) +
                    "' (expected levenshtein, jaccard_tokens, qgram, cosine_qgram)");
}

inline Tokenizer parse_tokenizer(std::string_view s) {
  if (s == "whitespace") return Tokenizer::whitespace;
  if (s == "lowercase_whitespace") return Tokenizer::lowercase_whitespace;
  throw ConfigError("unknown tokenizer '" + std::string(s) + "'");
}

struct BaselineSpec {
  Metric metric = Metric::jaccard_tokens;
  int q = 3;
  Tokenizer tokenizer = Tokenizer::lowercase_whitespace;

  void validate() const {
    if (q < 1) throw ConfigError("q must be >= 1, got " + std::to_string(q));
  }
};

// ---- Levenshtein -----------------------------------------------------------

/// Edit distance with unit costs, two-row dynamic programme, O(min(m,n)) memory.
inline std::size_t edit_distance(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t subst = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, subst});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

inline double levenshtein_similarity(std::string_view a, std::string_view b) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(edit_distance(a, b)) / static_cast<double>(longest);
}

// ---- token / gram sets -----------------------------------------------------

/// Whitespace split. The lowercase variant also folds ASCII case and trims
/// leading/trailing punctuation from each token ("Craf." -> "craf",
/// "miR-146a" keeps its inner hyphen). Tokens left empty are dropped.
inline std::vector<std::string> tokenize(std::string_view text, Tokenizer tokenizer) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  auto space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (i < text.size()) {
    while (i < text.size() && space(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !space(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) {
      std::string tok(text.substr(i, j - i));
      if (tokenizer == Tokenizer::lowercase_whitespace) {
        auto punct = [](unsigned char c) { return c < 0x80 && std::ispunct(c) != 0; };
        std::size_t b = 0, e = tok.size();
        while (b < e && punct(static_cast<unsigned char>(tok[b]))) ++b;
        while (e > b && punct(static_cast<unsigned char>(tok[e - 1]))) --e;
        tok = tok.substr(b, e - b);
        for (auto& c : tok) {
          if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
        }
      }
      if (!tok.empty()) tokens.push_back(std::move(tok));
    }
    i = j;
  }
  return tokens;
}

/// Character q-grams with multiplicity. A non-empty string shorter than q
/// contributes itself as a single gram; the empty string has none.
inline std::map<std::string, std::size_t> qgram_counts(std::string_view text, int q) {
  if (q < 1) throw ConfigError("q must be >= 1, got " + std::to_string(q));
  std::map<std::string, std::size_t> counts;
  const auto uq = static_cast<std::size_t>(q);
  if (text.empty()) return counts;
  if (text.size() < uq) {
    counts[std::string(text)] = 1;
    return counts;
  }
  for (std::size_t i = 0; i + uq <= text.size(); ++i) ++counts[std::string(text.substr(i, uq))];
  return counts;
}

template <class Set>
double jaccard_of_sets(const Set& a, const Set& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& x : a) inter += b.count(x);
  const std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

inline double jaccard_similarity(std::string_view a, std::string_view b,
                                 Tokenizer tokenizer = Tokenizer::lowercase_whitespace) {
  const auto ta = tokenize(a, tokenizer);
  const auto tb = tokenize(b, tokenizer);
  return jaccard_of_sets(std::set<std::string>(ta.begin(), ta.end()),
                         std::set<std::string>(tb.begin(), tb.end()));
}

inline double qgram_similarity(std::string_view a, std::string_view b, int q = 3) {
  std::set<std::string> ga, gb;
  for (const auto& [g, _] : qgram_counts(a, q)) ga.insert(g);
  for (const auto& [g, _] : qgram_counts(b, q)) gb.insert(g);
  return jaccard_of_sets(ga, gb);
}

inline double cosine_qgram_similarity(std::string_view a, std::string_view b, int q = 3) {
  const auto ca = qgram_counts(a, q);
  const auto cb = qgram_counts(b, q);
  if (ca.empty() || cb.empty()) return 0.0;
  // Identical profiles are exactly 1; the float path can land one ulp off.
  if (ca == cb) return 1.0;
  double dot = 0, na = 0, nb = 0;
  for (const auto& [g, n] : ca) {
    na += static_cast<double>(n) * n;
    if (auto it = cb.find(g); it != cb.end()) dot += static_cast<double>(n) * it->second;
  }
  for (const auto& [g, n] : cb) nb += static_cast<double>(n) * n;
  return std::clamp(dot / std::sqrt(na * nb), 0.0, 1.0);
}

inline double baseline_similarity(std::string_view a, std::string_view b, const BaselineSpec& spec) {
  switch (spec.metric) {
    case Metric::levenshtein: return levenshtein_similarity(a, b);
    case Metric::jaccard_tokens: return jaccard_similarity(a, b, spec.tokenizer);
    case Metric::qgram: return qgram_similarity(a, b, spec.q);
    case Metric::cosine_qgram: return cosine_qgram_similarity(a, b, spec.q);
  }
  return 0.0;
}

struct BaselineResult {
  BaselineSpec spec;
  std::vector<double> metric_values;  ///< one per test pair, in id order
  CorrelationResult correlation;
};

/// Metric on every test pair, correlated against the reference scores on the
/// metric's native [0, 1] scale.
inline BaselineResult baseline_correlation(const Dataset& dataset, const BaselineSpec& spec) {
  spec.validate();
  if (dataset.test.empty()) throw EmptySplit("test");
  BaselineResult out{spec, {}, {}};
  std::vector<double> reference;
  for (const auto& p : dataset.test) {
    out.metric_values.push_back(baseline_similarity(p.sentence1, p.sentence2, spec));
    reference.push_back(p.reference_score);
  }
  out.correlation = pearson(reference, out.metric_values, "reference", to_string(spec.metric));
  return out;
}

}  // namespace simrag
