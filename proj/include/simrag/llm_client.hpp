#pragma once

// Chat-completion client surface: run configuration, the provider
// abstraction, the deterministic mock provider, and the score-with-retry
// loop. The HTTP provider lives in http_provider.hpp so that code which only
// needs the mock does not pull in the HTTP stack.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "simrag/dataset.hpp"
#include "simrag/error.hpp"
#include "simrag/log.hpp"
#include "simrag/numeric_format.hpp"
#include "simrag/parser.hpp"
#include "simrag/prompt.hpp"
#include "simrag/random.hpp"

namespace simrag {

enum class ProviderKind { http, mock };

inline std::string_view to_string(ProviderKind k) { return k == ProviderKind::http ? "http" : "mock"; }

inline ProviderKind parse_provider_kind(std::string_view s) {
  if (s == "http") return ProviderKind::http;
  if (s == "mock") return ProviderKind::mock;
  throw ConfigError("unknown provider '" + std::string(s) + "' (expected http or mock)");
}

inline constexpr int kMaxRetriesLimit = 20;

struct RunConfig {
  std::string model_name = "gpt-3.5-turbo";
  double temperature = 0.0;
  std::int64_t seed = 42;
  std::size_t k_examples = 0;
  std::uint64_t selection_seed = 0;
  SelectionMode selection = SelectionMode::sampled;
  int max_retries = 3;
  std::string endpoint = "https://api.openai.com/v1";
  std::chrono::milliseconds timeout{60'000};
  double rate_limit = 0.0;  ///< requests per second, 0 = unlimited
  int parallelism = 4;

  void validate() const {
    if (!(temperature >= 0.0 && temperature <= 1.0)) {
      throw ConfigError("temperature must lie in [0, 1], got " + format_decimal(temperature));
    }
    if (max_retries < 0 || max_retries > kMaxRetriesLimit) {
      throw ConfigError("max_retries must lie in [0, " + std::to_string(kMaxRetriesLimit) +
                        "], got " + std::to_string(max_retries));
    }
    if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
    if (!(rate_limit >= 0.0)) throw ConfigError("rate_limit must be >= 0");
    if (timeout.count() <= 0) throw ConfigError("timeout must be positive");
    if (model_name.empty()) throw ConfigError("model name must not be empty");
  }
};

/// One chat-completion call. `pair_id` and `attempt` are bookkeeping for
/// providers that key behaviour on them (the mock); they never go on the wire.
struct ChatRequest {
  std::string model;
  double temperature = 0.0;
  std::int64_t seed = 0;
  std::string system_prompt;
  std::string user_prompt;
  int pair_id = -1;
  int attempt = 1;
};

struct ChatExchange {
  std::string system_prompt;
  std::string user_prompt;
  std::string raw_response;
  int attempts = 1;
  ProviderKind provider = ProviderKind::mock;
};

class ChatProvider {
 public:
  virtual ~ChatProvider() = default;

  /// Message text of the completion, untrimmed. Must be safe to call from
  /// several threads at once.
  virtual std::string complete(const ChatRequest& request) = 0;
  virtual ProviderKind kind() const noexcept = 0;
  /// Stable identity of whatever determines the responses; part of the
  /// content address of run outputs.
  virtual std::string fingerprint() const = 0;
};

// ---- mock ------------------------------------------------------------------

struct MockConfig {
  std::map<int, double> scores;  ///< pair id -> score the mock reports
  double malformed_rate = 0.0;
  double noise_sigma = 0.0;

  void validate() const {
    if (!(malformed_rate >= 0.0 && malformed_rate <= 1.0)) {
      throw ConfigError("malformed_rate must lie in [0, 1]");
    }
    if (!(noise_sigma >= 0.0)) throw ConfigError("noise_sigma must be >= 0");
  }

  /// Table holding every reference score of the dataset.
  static MockConfig echo(const Dataset& ds) {
    MockConfig cfg;
    for (Split s : kAllSplits) {
      for (const auto& p : ds.split(s)) cfg.scores[p.id] = p.reference_score;
    }
    return cfg;
  }

  nlohmann::json to_json() const {
    nlohmann::json scores_json = nlohmann::json::object();
    for (const auto& [id, v] : scores) scores_json[std::to_string(id)] = v;
    return {{"scores", scores_json}, {"malformed_rate", malformed_rate}, {"noise_sigma", noise_sigma}};
  }

  /// {"scores": {"<id>": score, ...}, "malformed_rate": r, "noise_sigma": s};
  /// both rate fields are optional.
  static MockConfig from_json(const nlohmann::json& j) {
    MockConfig cfg;
    try {
      if (!j.is_object() || !j.contains("scores") || !j.at("scores").is_object()) {
        throw ConfigError("mock table must be an object with a 'scores' object");
      }
      for (const auto& [key, value] : j.at("scores").items()) {
        std::size_t used = 0;
        int id = 0;
        try {
          id = std::stoi(key, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != key.size()) throw ConfigError("mock table key '" + key + "' is not a pair id");
        cfg.scores[id] = value.get<double>();
      }
      cfg.malformed_rate = j.value("malformed_rate", 0.0);
      cfg.noise_sigma = j.value("noise_sigma", 0.0);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("invalid mock table: ") + e.what());
    }
    cfg.validate();
    return cfg;
  }

  static MockConfig load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingFile(path.string());
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path.string() + ": " + e.what());
    }
    return from_json(j);
  }
};

inline constexpr std::string_view kMockMalformedResponse = "I think they are similar.";

namespace mock_streams {
inline constexpr std::uint64_t noise = 1;
inline constexpr std::uint64_t malformed = 2;
}  // namespace mock_streams

/// Offline provider answering from a score table. Responses are a pure
/// function of (request seed, pair id, attempt, configuration) and ignore
/// temperature, model, and prompt text.
///
/// Noise: score + sigma * z with z standard normal keyed on
/// (seed, pair id, attempt), clamped to [0, 4] and rounded to two decimals.
class MockProvider final : public ChatProvider {
 public:
  explicit MockProvider(MockConfig config) : config_(std::move(config)) { config_.validate(); }

  std::string complete(const ChatRequest& req) override {
    calls_.fetch_add(1, std::memory_order_relaxed);
    const auto it = config_.scores.find(req.pair_id);
    if (it == config_.scores.end()) {
      throw ProviderError("mock table has no score for pair " + std::to_string(req.pair_id));
    }
    const auto seed = static_cast<std::uint64_t>(req.seed);
    const auto id = static_cast<std::uint64_t>(req.pair_id);
    const auto attempt = static_cast<std::uint64_t>(req.attempt);
    if (config_.malformed_rate > 0.0 &&
        to_unit(hash_words(seed, mock_streams::malformed, id, attempt)) < config_.malformed_rate) {
      return std::string(kMockMalformedResponse);
    }
    double value = it->second;
    if (config_.noise_sigma > 0.0) {
      const std::uint64_t index = (id << 16) ^ attempt;
      value += config_.noise_sigma * keyed_gaussian(seed, mock_streams::noise, index);
      value = std::clamp(value, kMinScore, kMaxScore);
      value = std::round(value * 100.0) / 100.0;
    }
    return std::string(kResponseMarker) + " " + format_decimal(value);
  }

  ProviderKind kind() const noexcept override { return ProviderKind::mock; }

  std::string fingerprint() const override {
    char buf[32];
    std::snprintf(buf, sizeof buf, "mock:%016llx",
                  static_cast<unsigned long long>(fnv1a64(config_.to_json().dump())));
    return buf;
  }

  const MockConfig& config() const noexcept { return config_; }
  std::size_t calls() const noexcept { return calls_.load(); }

 private:
  MockConfig config_;
  std::atomic<std::size_t> calls_{0};
};

// ---- scoring ---------------------------------------------------------------

struct ScoredPair {
  SentencePair pair;
  std::optional<double> model_score;  ///< empty when excluded
  std::string raw_response;           ///< last response received
  int attempts = 0;
  bool excluded = false;

  friend bool operator==(const ScoredPair&, const ScoredPair&) = default;
};

inline std::string chat_complete(ChatProvider& provider, const RunConfig& config,
                                 std::string_view system_prompt, std::string_view user_prompt,
                                 int pair_id = -1, int attempt = 1) {
  ChatRequest req{config.model_name,         config.temperature,       config.seed,
                  std::string(system_prompt), std::string(user_prompt), pair_id,
                  attempt};
  return provider.complete(req);
}

/// Ask for a score, re-asking with identical inputs until the response
/// parses to a value in [0, 4]. Throws FormatExhausted after
/// max_retries + 1 failed attempts. Transport errors propagate unchanged.
inline ScoredPair score_pair(ChatProvider& provider, const RunConfig& config,
                             std::string_view system_prompt, const SentencePair& pair) {
  const std::string user_prompt = build_user_prompt(pair);
  std::string last;
  const int max_attempts = config.max_retries + 1;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    last = chat_complete(provider, config, system_prompt, user_prompt, pair.id, attempt);
    if (auto score = try_parse_similarity(last)) {
      return ScoredPair{pair, score, std::move(last), attempt, false};
    }
  }
  throw FormatExhausted(pair.id, std::move(last), max_attempts);
}

}  // namespace simrag
