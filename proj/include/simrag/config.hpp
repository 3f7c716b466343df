#pragma once

// Effective CLI configuration, merged from three layers with precedence
// flags > environment (SIMRAG_<KEY>) > JSON config file > built-in default.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "simrag/baselines.hpp"
#include "simrag/dataset.hpp"
#include "simrag/error.hpp"
#include "simrag/llm_client.hpp"
#include "simrag/numeric_format.hpp"

namespace simrag {

/// Keys understood in every layer. In the environment each is spelled
/// SIMRAG_ + upper-case key (SIMRAG_ENDPOINT, SIMRAG_MAX_RETRIES, ...).
inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "dataset",     "format",     "provider",    "endpoint",      "model",
      "temperature", "seed",       "examples",    "selection_seed", "first_k",
      "max_retries", "parallelism", "out",        "metric",        "q",
      "tokenizer",   "mock_table", "malformed_rate", "noise_sigma", "rate_limit",
      "timeout_ms",  "temperatures", "sizes",
  };
  return keys;
}

inline constexpr const char* kApiKeyEnv = "SIMRAG_API_KEY";

inline std::string env_name(std::string_view key) {
  std::string out = "SIMRAG_";
  for (char c : key) out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

enum class ConfigSource { flag, env, file, fallback };

inline std::string_view to_string(ConfigSource s) {
  switch (s) {
    case ConfigSource::flag: return "flag";
    case ConfigSource::env: return "env";
    case ConfigSource::file: return "file";
    case ConfigSource::fallback: return "default";
  }
  return "?";
}

struct ConfigLayers {
  std::map<std::string, std::string> flags;
  std::map<std::string, std::string> env;
  std::map<std::string, std::string> file;

  struct Resolved {
    std::string value;
    ConfigSource source;
  };

  std::optional<Resolved> lookup(const std::string& key) const {
    if (auto it = flags.find(key); it != flags.end()) return Resolved{it->second, ConfigSource::flag};
    if (auto it = env.find(key); it != env.end()) return Resolved{it->second, ConfigSource::env};
    if (auto it = file.find(key); it != file.end()) return Resolved{it->second, ConfigSource::file};
    return std::nullopt;
  }
};

/// Environment layer through a getter, so tests need not touch the process
/// environment.
template <class Getenv>
std::map<std::string, std::string> env_layer(Getenv&& getenv_fn) {
  std::map<std::string, std::string> out;
  for (const auto& key : config_keys()) {
    const char* v = getenv_fn(env_name(key).c_str());
    if (v != nullptr) out[key] = v;
  }
  return out;
}

inline std::map<std::string, std::string> process_env_layer() {
  return env_layer([](const char* name) { return std::getenv(name); });
}

/// Flat JSON object of config keys. Non-string scalars are kept as their
/// JSON text; arrays become comma-separated lists.
inline std::map<std::string, std::string> file_layer(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  std::map<std::string, std::string> out;
  for (const auto& [key, value] : j.items()) {
    if (std::find(config_keys().begin(), config_keys().end(), key) == config_keys().end()) {
      throw ConfigError("unknown config key '" + key + "'");
    }
    if (value.is_string()) {
      out[key] = value.get<std::string>();
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& v : value) {
        if (!joined.empty()) joined += ',';
        joined += v.is_string() ? v.get<std::string>() : v.dump();
      }
      out[key] = joined;
    } else {
      out[key] = value.dump();
    }
  }
  return out;
}

inline std::map<std::string, std::string> file_layer(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingFile(path.string());
  try {
    return file_layer(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

struct CliConfig {
  std::optional<std::filesystem::path> dataset;
  DatasetFormat format = DatasetFormat::single_file;
  std::optional<ProviderKind> provider;  ///< unset: http with an API key, else mock
  RunConfig run;
  std::filesystem::path out = "out";
  BaselineSpec baseline;
  std::optional<std::filesystem::path> mock_table;
  std::optional<double> malformed_rate;
  std::optional<double> noise_sigma;
  std::vector<double> temperatures;       ///< empty: defaults
  std::vector<std::size_t> sample_sizes;  ///< empty: defaults
  std::string api_key;
  std::map<std::string, ConfigSource> sources;

  ProviderKind effective_provider() const {
    if (provider) return *provider;
    return api_key.empty() ? ProviderKind::mock : ProviderKind::http;
  }
};

namespace detail {

inline double config_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double d = 0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size() || !std::isfinite(d)) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
  return d;
}

inline long long config_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long i = 0;
  try {
    i = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return i;
}

inline bool config_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace detail

/// Typed, validated configuration. Throws ConfigError on any bad value.
inline CliConfig resolve_cli_config(const ConfigLayers& layers, std::string api_key = {}) {
  CliConfig c;
  c.api_key = std::move(api_key);
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    auto r = layers.lookup(key);
    if (!r) return std::nullopt;
    c.sources[key] = r->source;
    return r->value;
  };
  using detail::config_double;
  using detail::config_int;

  if (auto v = get("dataset")) c.dataset = *v;
  if (auto v = get("format")) {
    if (*v == "single-file") c.format = DatasetFormat::single_file;
    else if (*v == "pre-split") c.format = DatasetFormat::pre_split;
    else throw ConfigError("format: expected single-file or pre-split, got '" + *v + "'");
  }
  if (auto v = get("provider")) c.provider = parse_provider_kind(*v);
  if (auto v = get("endpoint")) c.run.endpoint = *v;
  if (auto v = get("model")) c.run.model_name = *v;
  if (auto v = get("temperature")) c.run.temperature = config_double("temperature", *v);
  if (auto v = get("seed")) c.run.seed = config_int("seed", *v);
  if (auto v = get("examples")) {
    const auto k = config_int("examples", *v);
    if (k < 0) throw ConfigError("examples must be >= 0");
    c.run.k_examples = static_cast<std::size_t>(k);
  }
  if (auto v = get("selection_seed")) {
    const auto s = config_int("selection_seed", *v);
    if (s < 0) throw ConfigError("selection_seed must be >= 0");
    c.run.selection_seed = static_cast<std::uint64_t>(s);
  }
  if (auto v = get("first_k")) {
    c.run.selection = detail::config_bool("first_k", *v) ? SelectionMode::first_k : SelectionMode::sampled;
  }
  if (auto v = get("max_retries")) c.run.max_retries = static_cast<int>(config_int("max_retries", *v));
  if (auto v = get("parallelism")) c.run.parallelism = static_cast<int>(config_int("parallelism", *v));
  if (auto v = get("rate_limit")) c.run.rate_limit = config_double("rate_limit", *v);
  if (auto v = get("timeout_ms")) c.run.timeout = std::chrono::milliseconds(config_int("timeout_ms", *v));
  if (auto v = get("out")) c.out = *v;
  if (auto v = get("metric")) c.baseline.metric = parse_metric(*v);
  if (auto v = get("q")) c.baseline.q = static_cast<int>(config_int("q", *v));
  if (auto v = get("tokenizer")) c.baseline.tokenizer = parse_tokenizer(*v);
  if (auto v = get("mock_table")) c.mock_table = *v;
  if (auto v = get("malformed_rate")) c.malformed_rate = config_double("malformed_rate", *v);
  if (auto v = get("noise_sigma")) c.noise_sigma = config_double("noise_sigma", *v);
  if (auto v = get("temperatures")) {
    for (const auto& t : detail::split_list(*v)) c.temperatures.push_back(config_double("temperatures", t));
    if (c.temperatures.empty()) throw ConfigError("temperatures: empty list");
  }
  if (auto v = get("sizes")) {
    for (const auto& s : detail::split_list(*v)) {
      const auto k = config_int("sizes", s);
      if (k < 0) throw ConfigError("sizes must be >= 0");
      c.sample_sizes.push_back(static_cast<std::size_t>(k));
    }
    if (c.sample_sizes.empty()) throw ConfigError("sizes: empty list");
  }

  c.run.validate();
  c.baseline.validate();
  if (c.malformed_rate && !(*c.malformed_rate >= 0 && *c.malformed_rate <= 1)) {
    throw ConfigError("malformed_rate must lie in [0, 1]");
  }
  if (c.noise_sigma && *c.noise_sigma < 0) throw ConfigError("noise_sigma must be >= 0");
  return c;
}

/// Every effective value, for meta.json. The API key is reported only as
/// present or absent.
inline nlohmann::json effective_config_json(const CliConfig& c) {
  nlohmann::json sources = nlohmann::json::object();
  for (const auto& [k, s] : c.sources) sources[k] = std::string(to_string(s));
  return {
      {"dataset", c.dataset ? c.dataset->string() : std::string()},
      {"format", c.format == DatasetFormat::single_file ? "single-file" : "pre-split"},
      {"provider", std::string(to_string(c.effective_provider()))},
      {"endpoint", c.run.endpoint},
      {"model", c.run.model_name},
      {"temperature", c.run.temperature},
      {"seed", c.run.seed},
      {"examples", c.run.k_examples},
      {"selection_seed", c.run.selection_seed},
      {"first_k", c.run.selection == SelectionMode::first_k},
      {"max_retries", c.run.max_retries},
      {"parallelism", c.run.parallelism},
      {"rate_limit", c.run.rate_limit},
      {"timeout_ms", c.run.timeout.count()},
      {"out", c.out.string()},
      {"metric", std::string(to_string(c.baseline.metric))},
      {"q", c.baseline.q},
      {"tokenizer", std::string(to_string(c.baseline.tokenizer))},
      {"mock_table", c.mock_table ? c.mock_table->string() : std::string()},
      {"malformed_rate", c.malformed_rate ? nlohmann::json(*c.malformed_rate) : nlohmann::json(nullptr)},
      {"noise_sigma", c.noise_sigma ? nlohmann::json(*c.noise_sigma) : nlohmann::json(nullptr)},
      {"temperatures", c.temperatures},
      {"sizes", c.sample_sizes},
      {"api_key_present", !c.api_key.empty()},
      {"sources", sources},
  };
}

}  // namespace simrag
