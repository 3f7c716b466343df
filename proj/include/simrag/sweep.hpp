#pragma once

// Experiment orchestration: one scored pass over the test split, and the
// temperature, example-count and cross-factor sweeps built from it.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <exception>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "simrag/dataset.hpp"
#include "simrag/error.hpp"
#include "simrag/llm_client.hpp"
#include "simrag/log.hpp"
#include "simrag/prompt.hpp"
#include "simrag/random.hpp"
#include "simrag/stats.hpp"

namespace simrag {

struct RunResult {
  RunConfig config;
  ProviderKind provider = ProviderKind::mock;
  std::string config_hash;
  std::string system_prompt;
  std::vector<int> example_ids;
  std::vector<ScoredPair> scored;  ///< ordered by pair id
  CorrelationResult correlation;
  std::string timestamp;  ///< UTC, ISO 8601
};

/// Content address of a run: every input that can change its outputs.
inline std::string config_hash(const RunConfig& c, std::string_view provider_fingerprint,
                               std::string_view dataset_fingerprint) {
  const nlohmann::json key = {
      {"model", c.model_name},
      {"temperature", format_decimal(c.temperature)},
      {"seed", c.seed},
      {"k", c.k_examples},
      {"selection_seed", c.selection_seed},
      {"selection", std::string(to_string(c.selection))},
      {"max_retries", c.max_retries},
      {"provider", std::string(provider_fingerprint)},
      {"dataset", std::string(dataset_fingerprint)},
  };
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(key.dump())));
  return buf;
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Scores `pairs` with up to config.parallelism workers. Results come back
/// in input order whatever the completion order. Pairs whose responses never
/// parse are returned excluded; any other error aborts and is rethrown.
inline std::vector<ScoredPair> score_pairs(ChatProvider& provider, const RunConfig& config,
                                           std::string_view system_prompt,
                                           std::span<const SentencePair> pairs) {
  std::vector<ScoredPair> results(pairs.size());
  std::vector<std::exception_ptr> errors(pairs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= pairs.size() || abort.load()) return;
      try {
        results[i] = score_pair(provider, config, system_prompt, pairs[i]);
      } catch (const FormatExhausted& e) {
        results[i] = ScoredPair{pairs[i], std::nullopt, e.last_response(), e.attempts(), true};
      } catch (...) {
        errors[i] = std::current_exception();
        abort.store(true);
      }
    }
  };

  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(1, config.parallelism)), pairs.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

/// Correlation over the non-excluded pairs of a scored run.
inline CorrelationResult correlate_scored(std::span<const ScoredPair> scored) {
  std::vector<double> reference, model;
  std::size_t excluded = 0;
  for (const auto& s : scored) {
    if (s.excluded || !s.model_score) {
      ++excluded;
      continue;
    }
    reference.push_back(s.pair.reference_score);
    model.push_back(*s.model_score);
  }
  if (reference.empty()) throw AllPairsExcluded(scored.size());
  auto result = pearson(reference, model, "reference", "model");
  result.excluded = excluded;
  return result;
}

/// One evaluation pass: a single system prompt for the whole run, one fresh
/// user prompt per test pair, Pearson over the pairs that produced a score.
inline RunResult run_once(const Dataset& dataset, const RunConfig& config, ChatProvider& provider) {
  config.validate();
  if (dataset.test.empty()) throw EmptySplit("test");

  RunResult result;
  result.config = config;
  result.provider = provider.kind();
  result.config_hash = config_hash(config, provider.fingerprint(), dataset_fingerprint(dataset));
  result.timestamp = utc_timestamp();

  auto system = build_system_prompt(dataset.train, config.k_examples, config.selection_seed,
                                    config.selection);
  result.system_prompt = std::move(system.text);
  result.example_ids = std::move(system.example_ids);

  result.scored = score_pairs(provider, config, result.system_prompt, dataset.test);
  std::stable_sort(result.scored.begin(), result.scored.end(),
                   [](const ScoredPair& a, const ScoredPair& b) { return a.pair.id < b.pair.id; });

  std::size_t excluded = 0;
  for (const auto& s : result.scored) {
    if (s.excluded) {
      ++excluded;
      warn("pair " + std::to_string(s.pair.id) + " excluded after " + std::to_string(s.attempts) +
           " malformed responses; last response: " + s.raw_response);
    }
  }
  if (excluded > 0) {
    warn("run " + result.config_hash + ": correlation uses " +
         std::to_string(result.scored.size() - excluded) + " of " +
         std::to_string(result.scored.size()) + " pairs");
  }
  result.correlation = correlate_scored(result.scored);
  return result;
}

// ---- sweeps ----------------------------------------------------------------

using CellRunner = std::function<RunResult(const RunConfig&)>;

inline CellRunner direct_runner(const Dataset& dataset, ChatProvider& provider) {
  return [&dataset, &provider](const RunConfig& c) { return run_once(dataset, c, provider); };
}

/// A sweep cell either holds its run or the reason it failed.
struct CellOutcome {
  std::optional<RunResult> run;
  std::string error;
  std::optional<ErrorCategory> error_category;

  bool ok() const noexcept { return run.has_value(); }
  const CorrelationResult* correlation() const noexcept {
    return run ? &run->correlation : nullptr;
  }
};

inline CellOutcome run_cell(const CellRunner& runner, const RunConfig& config) {
  CellOutcome out;
  try {
    out.run = runner(config);
  } catch (const Error& e) {
    out.error = e.what();
    out.error_category = e.category();
    warn("cell failed: " + out.error);
  }
  return out;
}

struct SweepPoint {
  double temperature = 0.0;
  std::size_t k = 0;
  CellOutcome cell;
};

/// {0.0, 0.1, ..., 1.0}
inline std::vector<double> default_temperatures() {
  std::vector<double> t;
  for (int i = 0; i <= 10; ++i) t.push_back(i / 10.0);
  return t;
}

/// {0, 10, ..., 60}
inline std::vector<std::size_t> default_sample_sizes() {
  std::vector<std::size_t> k;
  for (std::size_t i = 0; i <= 60; i += 10) k.push_back(i);
  return k;
}

inline void check_temperatures(std::span<const double> temps) {
  if (temps.empty()) throw ConfigError("temperature list is empty");
  for (double t : temps) {
    if (!(t >= 0.0 && t <= 1.0)) {
      throw ConfigError("temperature " + format_decimal(t) + " outside [0, 1]");
    }
  }
}

inline std::vector<SweepPoint> temperature_sweep(const RunConfig& base, std::span<const double> temps,
                                                 const CellRunner& runner) {
  check_temperatures(temps);
  std::vector<SweepPoint> out;
  for (double t : temps) {
    RunConfig c = base;
    c.temperature = t;
    out.push_back(SweepPoint{t, c.k_examples, run_cell(runner, c)});
  }
  return out;
}

inline std::vector<SweepPoint> temperature_sweep(const Dataset& dataset, const RunConfig& base,
                                                 std::span<const double> temps,
                                                 ChatProvider& provider) {
  return temperature_sweep(base, temps, direct_runner(dataset, provider));
}

/// Sizes beyond the train split fail their own cell with KTooLarge.
inline std::vector<SweepPoint> example_sweep(const RunConfig& base, std::span<const std::size_t> sizes,
                                             const CellRunner& runner) {
  if (sizes.empty()) throw ConfigError("example-count list is empty");
  std::vector<SweepPoint> out;
  for (std::size_t k : sizes) {
    RunConfig c = base;
    c.k_examples = k;
    out.push_back(SweepPoint{c.temperature, k, run_cell(runner, c)});
  }
  return out;
}

inline std::vector<SweepPoint> example_sweep(const Dataset& dataset, const RunConfig& base,
                                             std::span<const std::size_t> sizes,
                                             ChatProvider& provider) {
  return example_sweep(base, sizes, direct_runner(dataset, provider));
}

struct GridArgmax {
  std::size_t temperature_index = 0;
  std::size_t k_index = 0;
  double temperature = 0.0;
  std::size_t k = 0;
  double r = 0.0;
};

struct SweepGrid {
  std::vector<double> temperatures;
  std::vector<std::size_t> sample_sizes;
  std::vector<std::vector<CellOutcome>> cells;  ///< [temperature][k]

  /// Best successful cell; ties go to the lowest temperature, then lowest k.
  std::optional<GridArgmax> argmax() const {
    std::optional<GridArgmax> best;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      for (std::size_t j = 0; j < cells[i].size(); ++j) {
        const auto* corr = cells[i][j].correlation();
        if (!corr) continue;
        if (!best || corr->r > best->r) {
          best = GridArgmax{i, j, temperatures[i], sample_sizes[j], corr->r};
        }
      }
    }
    return best;
  }

  std::size_t failed_cells() const {
    std::size_t n = 0;
    for (const auto& row : cells) {
      for (const auto& c : row) n += c.ok() ? 0 : 1;
    }
    return n;
  }
};

/// Every (temperature, k) combination, all sharing base.selection_seed so
/// cells with equal k inject identical examples.
inline SweepGrid cross_factor_grid(const RunConfig& base, std::span<const double> temps,
                                   std::span<const std::size_t> sizes, const CellRunner& runner) {
  check_temperatures(temps);
  if (sizes.empty()) throw ConfigError("example-count list is empty");
  SweepGrid grid{{temps.begin(), temps.end()}, {sizes.begin(), sizes.end()}, {}};
  grid.cells.resize(temps.size());
  for (std::size_t i = 0; i < temps.size(); ++i) {
    for (std::size_t k : sizes) {
      RunConfig c = base;
      c.temperature = temps[i];
      c.k_examples = k;
      grid.cells[i].push_back(run_cell(runner, c));
    }
  }
  return grid;
}

inline SweepGrid cross_factor_grid(const Dataset& dataset, const RunConfig& base,
                                   std::span<const double> temps, std::span<const std::size_t> sizes,
                                   ChatProvider& provider) {
  return cross_factor_grid(base, temps, sizes, direct_runner(dataset, provider));
}

}  // namespace simrag
