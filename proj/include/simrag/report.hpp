#pragma once

// Run artifacts on disk.
//
//   <out>/runs/<config-hash>/result.json   full run, used to resume sweeps
//   <out>/runs/<config-hash>/pairs.csv     Sentence1,Sentence2,reference_score,model_score,attempts,excluded
//   <out>/runs/<config-hash>/meta.json
//   <out>/grid.csv                          temperature,k,pearson_r,n,excluded,status
//   <out>/meta.json
//
// Every CSV is written next to a meta.json. Apart from its "timestamp" field,
// meta.json is a pure function of the configuration, so reruns against the
// mock provider reproduce all files byte for byte.

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "simrag/csv.hpp"
#include "simrag/error.hpp"
#include "simrag/llm_client.hpp"
#include "simrag/numeric_format.hpp"
#include "simrag/svg.hpp"
#include "simrag/sweep.hpp"

namespace simrag {

namespace fs = std::filesystem;

// ---- file helpers ----------------------------------------------------------

/// Write via a temporary sibling and rename, so readers never observe a
/// half-written file.
inline void write_file_atomic(const fs::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write to " + tmp.string() + " failed");
  }
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

inline std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFile(path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Exclusive claim on an output directory for the lifetime of the object.
class DirectoryLock {
 public:
  explicit DirectoryLock(const fs::path& dir) : path_(dir / ".simrag.lock") {
    std::error_code ec;
    fs::create_directories(dir, ec);
    const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
      if (errno == EEXIST) {
        throw IoError("output directory " + dir.string() + " is locked by another run (remove " +
                      path_.string() + " if that run is gone)");
      }
      throw IoError("cannot create lock " + path_.string() + ": " + std::strerror(errno));
    }
    const std::string pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] auto n = ::write(fd, pid.data(), pid.size());
    ::close(fd);
  }
  ~DirectoryLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;

 private:
  fs::path path_;
};

// ---- JSON mapping ----------------------------------------------------------

inline nlohmann::json to_json(const RunConfig& c) {
  return {
      {"model", c.model_name},
      {"temperature", c.temperature},
      {"seed", c.seed},
      {"k_examples", c.k_examples},
      {"selection_seed", c.selection_seed},
      {"selection", std::string(to_string(c.selection))},
      {"max_retries", c.max_retries},
      {"endpoint", c.endpoint},
      {"timeout_ms", c.timeout.count()},
      {"rate_limit", c.rate_limit},
      {"parallelism", c.parallelism},
  };
}

inline RunConfig run_config_from_json(const nlohmann::json& j) {
  RunConfig c;
  c.model_name = j.at("model").get<std::string>();
  c.temperature = j.at("temperature").get<double>();
  c.seed = j.at("seed").get<std::int64_t>();
  c.k_examples = j.at("k_examples").get<std::size_t>();
  c.selection_seed = j.at("selection_seed").get<std::uint64_t>();
  c.selection = j.at("selection").get<std::string>() == "first-k" ? SelectionMode::first_k
                                                                   : SelectionMode::sampled;
  c.max_retries = j.at("max_retries").get<int>();
  c.endpoint = j.at("endpoint").get<std::string>();
  c.timeout = std::chrono::milliseconds(j.at("timeout_ms").get<long long>());
  c.rate_limit = j.at("rate_limit").get<double>();
  c.parallelism = j.at("parallelism").get<int>();
  return c;
}

inline nlohmann::json to_json(const CorrelationResult& r) {
  return {{"r", r.r}, {"n", r.n}, {"excluded", r.excluded}};
}

inline nlohmann::json to_json(const RunResult& r) {
  nlohmann::json scored = nlohmann::json::array();
  for (const auto& s : r.scored) {
    scored.push_back({
        {"id", s.pair.id},
        {"sentence1", s.pair.sentence1},
        {"sentence2", s.pair.sentence2},
        {"reference_score", s.pair.reference_score},
        {"model_score", s.model_score ? nlohmann::json(*s.model_score) : nlohmann::json(nullptr)},
        {"raw_response", s.raw_response},
        {"attempts", s.attempts},
        {"excluded", s.excluded},
    });
  }
  return {
      {"config", to_json(r.config)},
      {"provider", std::string(to_string(r.provider))},
      {"config_hash", r.config_hash},
      {"system_prompt", r.system_prompt},
      {"example_ids", r.example_ids},
      {"scored", scored},
      {"correlation", to_json(r.correlation)},
      {"timestamp", r.timestamp},
  };
}

inline RunResult run_result_from_json(const nlohmann::json& j) {
  RunResult r;
  r.config = run_config_from_json(j.at("config"));
  r.provider = parse_provider_kind(j.at("provider").get<std::string>());
  r.config_hash = j.at("config_hash").get<std::string>();
  r.system_prompt = j.at("system_prompt").get<std::string>();
  r.example_ids = j.at("example_ids").get<std::vector<int>>();
  for (const auto& s : j.at("scored")) {
    ScoredPair sp;
    sp.pair.id = s.at("id").get<int>();
    sp.pair.sentence1 = s.at("sentence1").get<std::string>();
    sp.pair.sentence2 = s.at("sentence2").get<std::string>();
    sp.pair.reference_score = s.at("reference_score").get<double>();
    if (!s.at("model_score").is_null()) sp.model_score = s.at("model_score").get<double>();
    sp.raw_response = s.at("raw_response").get<std::string>();
    sp.attempts = s.at("attempts").get<int>();
    sp.excluded = s.at("excluded").get<bool>();
    r.scored.push_back(std::move(sp));
  }
  const auto& c = j.at("correlation");
  r.correlation = CorrelationResult{c.at("r").get<double>(), c.at("n").get<std::size_t>(),
                                    c.at("excluded").get<std::size_t>()};
  r.timestamp = j.at("timestamp").get<std::string>();
  return r;
}

// ---- pairs table -----------------------------------------------------------

struct PairsRow {
  std::string sentence1;
  std::string sentence2;
  double reference_score = 0.0;
  std::optional<double> model_score;
  int attempts = 0;
  bool excluded = false;

  friend bool operator==(const PairsRow&, const PairsRow&) = default;
};

inline const csv::Record kPairsHeader{"Sentence1",   "Sentence2", "reference_score",
                                      "model_score", "attempts",  "excluded"};

inline std::vector<PairsRow> pairs_rows(const RunResult& result) {
  std::vector<PairsRow> rows;
  for (const auto& s : result.scored) {
    rows.push_back(PairsRow{s.pair.sentence1, s.pair.sentence2, s.pair.reference_score,
                            s.excluded ? std::nullopt : s.model_score, s.attempts, s.excluded});
  }
  return rows;
}

inline std::string format_pairs_csv(const std::vector<PairsRow>& rows) {
  std::string out = csv::format_record(kPairsHeader);
  for (const auto& r : rows) {
    out += csv::format_record({r.sentence1, r.sentence2, format_decimal(r.reference_score),
                               r.model_score ? format_decimal(*r.model_score) : std::string(),
                               std::to_string(r.attempts), r.excluded ? "true" : "false"});
  }
  return out;
}

namespace detail {

inline double csv_number(const std::string& field, std::string_view what) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(field, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != field.size()) {
    throw Error(ErrorCategory::data, "csv: bad " + std::string(what) + " '" + field + "'");
  }
  return v;
}

inline bool csv_bool(const std::string& field) {
  if (field == "true") return true;
  if (field == "false") return false;
  throw Error(ErrorCategory::data, "csv: bad boolean '" + field + "'");
}

}  // namespace detail

inline std::vector<PairsRow> parse_pairs_csv(std::string_view text) {
  const auto records = csv::parse(text);
  if (records.empty() || records.front() != kPairsHeader) {
    throw Error(ErrorCategory::data, "pairs csv: unexpected header");
  }
  std::vector<PairsRow> rows;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i];
    if (f.size() != kPairsHeader.size()) throw Error(ErrorCategory::data, "pairs csv: wrong column count");
    PairsRow r;
    r.sentence1 = f[0];
    r.sentence2 = f[1];
    r.reference_score = detail::csv_number(f[2], "reference_score");
    if (!f[3].empty()) r.model_score = detail::csv_number(f[3], "model_score");
    r.attempts = static_cast<int>(detail::csv_number(f[4], "attempts"));
    r.excluded = detail::csv_bool(f[5]);
    rows.push_back(std::move(r));
  }
  return rows;
}

inline void write_pairs_csv(const RunResult& result, const fs::path& path) {
  write_file_atomic(path, format_pairs_csv(pairs_rows(result)));
}

// ---- sweep / grid tables ---------------------------------------------------

struct GridRow {
  double temperature = 0.0;
  std::size_t k = 0;
  std::optional<double> pearson_r;
  std::optional<std::size_t> n;
  std::optional<std::size_t> excluded;
  std::string status;  ///< "ok" or "failed"

  friend bool operator==(const GridRow&, const GridRow&) = default;
};

inline const csv::Record kGridHeader{"temperature", "k", "pearson_r", "n", "excluded", "status"};

inline GridRow grid_row(double temperature, std::size_t k, const CellOutcome& cell) {
  GridRow row{temperature, k, std::nullopt, std::nullopt, std::nullopt, "failed"};
  if (const auto* c = cell.correlation()) {
    row.pearson_r = c->r;
    row.n = c->n;
    row.excluded = c->excluded;
    row.status = "ok";
  }
  return row;
}

inline std::vector<GridRow> grid_rows(const SweepGrid& grid) {
  std::vector<GridRow> rows;
  for (std::size_t i = 0; i < grid.temperatures.size(); ++i) {
    for (std::size_t j = 0; j < grid.sample_sizes.size(); ++j) {
      rows.push_back(grid_row(grid.temperatures[i], grid.sample_sizes[j], grid.cells[i][j]));
    }
  }
  return rows;
}

inline std::vector<GridRow> sweep_rows(const std::vector<SweepPoint>& points) {
  std::vector<GridRow> rows;
  for (const auto& p : points) rows.push_back(grid_row(p.temperature, p.k, p.cell));
  return rows;
}

inline std::string format_grid_csv(const std::vector<GridRow>& rows) {
  std::string out = csv::format_record(kGridHeader);
  auto opt_size = [](const std::optional<std::size_t>& v) {
    return v ? std::to_string(*v) : std::string();
  };
  for (const auto& r : rows) {
    out += csv::format_record({format_decimal(r.temperature), std::to_string(r.k),
                               r.pearson_r ? format_decimal(*r.pearson_r) : std::string(),
                               opt_size(r.n), opt_size(r.excluded), r.status});
  }
  return out;
}

inline std::vector<GridRow> parse_grid_csv(std::string_view text) {
  const auto records = csv::parse(text);
  if (records.empty() || records.front() != kGridHeader) {
    throw Error(ErrorCategory::data, "grid csv: unexpected header");
  }
  std::vector<GridRow> rows;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i];
    if (f.size() != kGridHeader.size()) throw Error(ErrorCategory::data, "grid csv: wrong column count");
    GridRow r;
    r.temperature = detail::csv_number(f[0], "temperature");
    r.k = static_cast<std::size_t>(detail::csv_number(f[1], "k"));
    if (!f[2].empty()) r.pearson_r = detail::csv_number(f[2], "pearson_r");
    if (!f[3].empty()) r.n = static_cast<std::size_t>(detail::csv_number(f[3], "n"));
    if (!f[4].empty()) r.excluded = static_cast<std::size_t>(detail::csv_number(f[4], "excluded"));
    r.status = f[5];
    rows.push_back(std::move(r));
  }
  return rows;
}

inline void write_grid_csv(const SweepGrid& grid, const fs::path& path) {
  write_file_atomic(path, format_grid_csv(grid_rows(grid)));
}

inline void write_sweep_csv(const std::vector<SweepPoint>& points, const fs::path& path) {
  write_file_atomic(path, format_grid_csv(sweep_rows(points)));
}

// ---- metadata --------------------------------------------------------------

/// Run-level metadata. `extra` carries caller context (dataset path, CLI
/// values) and is merged in under "context".
inline nlohmann::json run_meta(const RunResult& r, std::string_view provider_fingerprint,
                               const nlohmann::json& extra = nlohmann::json::object()) {
  std::vector<int> excluded_ids;
  for (const auto& s : r.scored) {
    if (s.excluded) excluded_ids.push_back(s.pair.id);
  }
  return {
      {"config_hash", r.config_hash},
      {"config", to_json(r.config)},
      {"provider", std::string(to_string(r.provider))},
      {"provider_fingerprint", std::string(provider_fingerprint)},
      {"seeds", {{"seed", r.config.seed}, {"selection_seed", r.config.selection_seed}}},
      {"example_ids", r.example_ids},
      {"pearson_r", r.correlation.r},
      {"n", r.correlation.n},
      {"excluded", r.correlation.excluded},
      {"excluded_ids", excluded_ids},
      {"context", extra},
      {"timestamp", r.timestamp},
  };
}

inline std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

// ---- run store -------------------------------------------------------------

/// Content-addressed run directory tree under <root>/runs.
class RunStore {
 public:
  explicit RunStore(fs::path root) : root_(std::move(root)) {}

  fs::path dir_for(std::string_view hash) const { return root_ / "runs" / std::string(hash); }

  std::optional<RunResult> load(std::string_view hash) const {
    const auto path = dir_for(hash) / "result.json";
    if (!fs::is_regular_file(path)) return std::nullopt;
    try {
      return run_result_from_json(nlohmann::json::parse(read_text_file(path)));
    } catch (const nlohmann::json::exception& e) {
      warn("ignoring unreadable " + path.string() + ": " + e.what());
      return std::nullopt;
    }
  }

  /// pairs.csv and meta.json first, result.json last: a cell counts as
  /// complete only once result.json exists.
  void save(const RunResult& r, std::string_view provider_fingerprint,
            const nlohmann::json& extra = nlohmann::json::object()) const {
    const auto dir = dir_for(r.config_hash);
    write_pairs_csv(r, dir / "pairs.csv");
    write_file_atomic(dir / "meta.json", dump_json(run_meta(r, provider_fingerprint, extra)));
    write_file_atomic(dir / "result.json", dump_json(to_json(r)));
  }

  const fs::path& root() const noexcept { return root_; }

 private:
  fs::path root_;
};

/// Runner that reuses any completed cell found in the store and persists
/// each new one. `reused`, when given, counts cells served from disk.
inline CellRunner resumable_runner(const RunStore& store, const Dataset& dataset,
                                   ChatProvider& provider,
                                   nlohmann::json extra = nlohmann::json::object(),
                                   std::shared_ptr<std::size_t> reused = nullptr) {
  const std::string dataset_fp = dataset_fingerprint(dataset);
  return [&store, &dataset, &provider, extra = std::move(extra), reused,
          dataset_fp](const RunConfig& config) {
    const auto hash = config_hash(config, provider.fingerprint(), dataset_fp);
    if (auto cached = store.load(hash)) {
      if (reused) ++*reused;
      return *cached;
    }
    auto result = run_once(dataset, config, provider);
    store.save(result, provider.fingerprint(), extra);
    return result;
  };
}

// ---- plots -----------------------------------------------------------------

inline void write_svg(const fs::path& path, const std::string& svg) { write_file_atomic(path, svg); }

inline void emit_temperature_plot(const std::vector<GridRow>& rows, const fs::path& path) {
  std::vector<svg::LinePoint> pts;
  for (const auto& r : rows) pts.push_back({r.temperature, r.pearson_r});
  write_svg(path, svg::line_chart(pts, "Pearson correlation vs temperature", "temperature",
                                  "Pearson r"));
}

inline void emit_temperature_plot(const std::vector<SweepPoint>& points, const fs::path& path) {
  emit_temperature_plot(sweep_rows(points), path);
}

inline void emit_example_plot(const std::vector<GridRow>& rows, const fs::path& path) {
  std::vector<svg::LinePoint> pts;
  for (const auto& r : rows) pts.push_back({static_cast<double>(r.k), r.pearson_r});
  write_svg(path, svg::line_chart(pts, "Pearson correlation vs number of examples",
                                  "examples in system prompt", "Pearson r"));
}

inline void emit_example_plot(const std::vector<SweepPoint>& points, const fs::path& path) {
  emit_example_plot(sweep_rows(points), path);
}

/// Reference vs model score, one panel per run.
inline void emit_scatter_panels(const std::vector<RunResult>& runs, const fs::path& path) {
  std::vector<svg::ScatterPanel> panels;
  for (const auto& run : runs) {
    svg::ScatterPanel panel;
    char title[96];
    std::snprintf(title, sizeof title, "k=%zu  r=%.3f", run.config.k_examples, run.correlation.r);
    panel.title = title;
    for (const auto& s : run.scored) {
      if (s.excluded || !s.model_score) continue;
      panel.x.push_back(s.pair.reference_score);
      panel.y.push_back(*s.model_score);
    }
    panels.push_back(std::move(panel));
  }
  write_svg(path, svg::scatter_panels(panels, "Reference vs model similarity score"));
}

inline void emit_scatter_panels(const std::vector<SweepPoint>& points, const fs::path& path) {
  std::vector<RunResult> runs;
  for (const auto& p : points) {
    if (p.cell.ok()) runs.push_back(*p.cell.run);
  }
  emit_scatter_panels(runs, path);
}

inline void emit_grid_heatmap(const std::vector<GridRow>& rows, const fs::path& path) {
  std::vector<double> temps;
  std::vector<std::size_t> ks;
  for (const auto& r : rows) {
    if (std::find(temps.begin(), temps.end(), r.temperature) == temps.end()) temps.push_back(r.temperature);
    if (std::find(ks.begin(), ks.end(), r.k) == ks.end()) ks.push_back(r.k);
  }
  std::vector<std::vector<std::optional<double>>> values(
      temps.size(), std::vector<std::optional<double>>(ks.size()));
  for (const auto& r : rows) {
    const auto i = static_cast<std::size_t>(std::find(temps.begin(), temps.end(), r.temperature) - temps.begin());
    const auto j = static_cast<std::size_t>(std::find(ks.begin(), ks.end(), r.k) - ks.begin());
    values[i][j] = r.pearson_r;
  }
  std::vector<std::string> row_labels, col_labels;
  for (double t : temps) row_labels.push_back(format_decimal(t));
  for (auto k : ks) col_labels.push_back(std::to_string(k));
  write_svg(path, svg::heatmap(row_labels, col_labels, values,
                               "Pearson correlation by temperature and sample size", "temperature",
                               "examples in system prompt"));
}

inline void emit_grid_heatmap(const SweepGrid& grid, const fs::path& path) {
  emit_grid_heatmap(grid_rows(grid), path);
}

}  // namespace simrag
