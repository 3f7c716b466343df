#pragma once

// Prompt construction. Output is byte-stable: identical inputs always give
// identical prompt text. The example template keeps the "similarty"
// spelling on purpose; golden files pin it.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "simrag/dataset.hpp"
#include "simrag/error.hpp"
#include "simrag/numeric_format.hpp"
#include "simrag/random.hpp"

namespace simrag {

inline constexpr std::string_view kSystemPreamble =
    "You are a helpful assistant who helps retrieve similarity scores between two sentences.";
inline constexpr std::string_view kExamplesIntro =
    "You will find below some examples to help you determine this similarity score with the "
    "best accuracy:";
inline constexpr std::string_view kExampleMarker = "have a similarty score of";
inline constexpr std::string_view kResponseMarker = "Similarity score :";

/// How few-shot examples are drawn from the train split.
enum class SelectionMode {
  sampled,  ///< seeded uniform sampling without replacement, sampled order
  first_k,  ///< the first k train rows in dataset order
};

inline std::string_view to_string(SelectionMode m) {
  return m == SelectionMode::first_k ? "first-k" : "sampled";
}

struct SystemPrompt {
  std::string text;
  std::vector<int> example_ids;
};

struct PromptBundle {
  std::string system_prompt;
  std::string user_prompt;
  std::vector<int> example_ids;
  std::size_t k = 0;
  std::uint64_t selection_seed = 0;
};

/// Score text as it appears in examples: 2.2 -> "2.2", 4.0 -> "4".
inline std::string render_score(double score) { return format_decimal(score); }

inline std::string format_example(const SentencePair& pair) {
  std::string out = "The sentence \"";
  out += pair.sentence1;
  out += "\" and the sentence \"";
  out += pair.sentence2;
  out += "\" ";
  out += kExampleMarker;
  out += ' ';
  out += render_score(pair.reference_score);
  return out;
}

/// Indices into `train` of the examples to inject.
inline std::vector<std::size_t> select_examples(std::size_t train_size, std::size_t k,
                                                std::uint64_t selection_seed,
                                                SelectionMode mode) {
  if (k > train_size) throw KTooLarge(k, train_size);
  if (mode == SelectionMode::first_k) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    return idx;
  }
  return sample_without_replacement(train_size, k, selection_seed);
}

/// Preamble plus k formatted examples, one per line, no trailing newline.
/// With k = 0 only the first preamble sentence is emitted.
inline SystemPrompt build_system_prompt(std::span<const SentencePair> train, std::size_t k,
                                        std::uint64_t selection_seed,
                                        SelectionMode mode = SelectionMode::sampled) {
  const auto picks = select_examples(train.size(), k, selection_seed, mode);
  SystemPrompt out;
  out.text = kSystemPreamble;
  if (k == 0) return out;
  out.text += '\n';
  out.text += kExamplesIntro;
  for (auto i : picks) {
    out.text += '\n';
    out.text += format_example(train[i]);
    out.example_ids.push_back(train[i].id);
  }
  return out;
}

inline std::string build_user_prompt(const SentencePair& pair) {
  std::string out =
      "Please give me the similarity score from 0 to 4 between those sentences: \"";
  out += pair.sentence1;
  out += "\" and \"";
  out += pair.sentence2;
  out += "\". Always respond using strictly and only the following format: ";
  out += kResponseMarker;
  out += " ...";
  return out;
}

inline PromptBundle build_prompt_bundle(std::span<const SentencePair> train,
                                        const SentencePair& query, std::size_t k,
                                        std::uint64_t selection_seed,
                                        SelectionMode mode = SelectionMode::sampled) {
  auto sys = build_system_prompt(train, k, selection_seed, mode);
  return PromptBundle{std::move(sys.text), build_user_prompt(query), std::move(sys.example_ids),
                      k, selection_seed};
}

/// Non-overlapping occurrences of `needle` in `haystack`.
inline std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
  if (needle.empty()) return 0;
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string_view::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

}  // namespace simrag
