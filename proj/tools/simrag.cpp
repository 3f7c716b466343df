// simrag: command-line front end.
//
//   simrag validate        --dataset FILE
//   simrag run             --dataset FILE [--temperature T] [--examples K] ...
//   simrag sweep-temp      --dataset FILE [--temperatures 0,0.5,1]
//   simrag sweep-examples  --dataset FILE [--sizes 0,10,20]
//   simrag grid            --dataset FILE
//   simrag baseline        --dataset FILE --metric jaccard_tokens
//   simrag report          --out DIR
//
// Exit codes: 0 ok, 1 malformed dataset (validate), 2 configuration,
// 3 transport, 4 data, 5 degenerate statistics.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "simrag/simrag.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Context {
  simrag::CliConfig cfg;
  std::string command;
};

simrag::Dataset load_inputs(const simrag::CliConfig& cfg) {
  if (!cfg.dataset) throw simrag::ConfigError("--dataset is required");
  return simrag::load_dataset(*cfg.dataset, cfg.format);
}

std::unique_ptr<simrag::ChatProvider> make_provider(const simrag::CliConfig& cfg,
                                                    const simrag::Dataset& ds) {
  if (cfg.effective_provider() == simrag::ProviderKind::http) {
    return std::make_unique<simrag::HttpProvider>(simrag::http_options_from(cfg.run, cfg.api_key));
  }
  auto mock = cfg.mock_table ? simrag::MockConfig::load(*cfg.mock_table) : simrag::MockConfig::echo(ds);
  if (cfg.malformed_rate) mock.malformed_rate = *cfg.malformed_rate;
  if (cfg.noise_sigma) mock.noise_sigma = *cfg.noise_sigma;
  return std::make_unique<simrag::MockProvider>(std::move(mock));
}

std::string fmt_r(double r) { return simrag::format_decimal(r); }

json cells_json(const std::vector<simrag::SweepPoint>& points) {
  json cells = json::array();
  for (const auto& p : points) {
    json cell = {{"temperature", p.temperature}, {"k", p.k}};
    if (p.cell.ok()) {
      cell["config_hash"] = p.cell.run->config_hash;
      cell["status"] = "ok";
      cell["pearson_r"] = p.cell.run->correlation.r;
      cell["excluded"] = p.cell.run->correlation.excluded;
    } else {
      cell["status"] = "failed";
      cell["error"] = p.cell.error;
    }
    cells.push_back(cell);
  }
  return cells;
}

json sweep_meta(const Context& ctx, const simrag::ChatProvider& provider,
                const simrag::Dataset& ds, json cells) {
  std::size_t failed = 0;
  for (const auto& c : cells) failed += c.at("status") == "failed" ? 1 : 0;
  return {
      {"command", ctx.command},
      {"config", simrag::effective_config_json(ctx.cfg)},
      {"dataset_fingerprint", simrag::dataset_fingerprint(ds)},
      {"provider", std::string(simrag::to_string(provider.kind()))},
      {"provider_fingerprint", provider.fingerprint()},
      {"cells", std::move(cells)},
      {"failed_cells", failed},
      {"timestamp", simrag::utc_timestamp()},
  };
}

void report_failures(const json& meta) {
  if (meta.at("failed_cells").get<std::size_t>() > 0) {
    std::cerr << "warning: " << meta.at("failed_cells").get<std::size_t>()
              << " cell(s) failed; see meta for the failure manifest\n";
  }
}

int cmd_validate(const Context& ctx) {
  const auto ds = load_inputs(ctx.cfg);
  const auto counts = simrag::validate_counts(ds);
  std::cout << "train=" << counts.train << " validation=" << counts.validation
            << " test=" << counts.test << "\n";
  if (!counts.canonical) std::cerr << "warning: " << counts.warning << "\n";
  return 0;
}

int cmd_run(const Context& ctx) {
  const auto ds = load_inputs(ctx.cfg);
  auto provider = make_provider(ctx.cfg, ds);
  simrag::DirectoryLock lock(ctx.cfg.out);
  simrag::RunStore store(ctx.cfg.out);
  auto runner = simrag::resumable_runner(store, ds, *provider, simrag::effective_config_json(ctx.cfg));
  const auto result = runner(ctx.cfg.run);
  std::cout << "pearson_r=" << fmt_r(result.correlation.r) << " n=" << result.correlation.n
            << " excluded=" << result.correlation.excluded << " run="
            << store.dir_for(result.config_hash).string() << "\n";
  return 0;
}

int cmd_sweep_temp(const Context& ctx) {
  const auto ds = load_inputs(ctx.cfg);
  auto provider = make_provider(ctx.cfg, ds);
  simrag::DirectoryLock lock(ctx.cfg.out);
  simrag::RunStore store(ctx.cfg.out);
  auto runner = simrag::resumable_runner(store, ds, *provider, simrag::effective_config_json(ctx.cfg));
  const auto temps = ctx.cfg.temperatures.empty() ? simrag::default_temperatures() : ctx.cfg.temperatures;
  const auto points = simrag::temperature_sweep(ctx.cfg.run, temps, runner);

  simrag::write_sweep_csv(points, ctx.cfg.out / "temperature_sweep.csv");
  simrag::emit_temperature_plot(points, ctx.cfg.out / "temperature_sweep.svg");
  const auto meta = sweep_meta(ctx, *provider, ds, cells_json(points));
  simrag::write_file_atomic(ctx.cfg.out / "temperature_sweep.meta.json", simrag::dump_json(meta));
  for (const auto& p : points) {
    std::cout << "temperature=" << simrag::format_decimal(p.temperature) << " "
              << (p.cell.ok() ? "pearson_r=" + fmt_r(p.cell.run->correlation.r) : "failed: " + p.cell.error)
              << "\n";
  }
  report_failures(meta);
  return 0;
}

int cmd_sweep_examples(const Context& ctx) {
  const auto ds = load_inputs(ctx.cfg);
  auto provider = make_provider(ctx.cfg, ds);
  simrag::DirectoryLock lock(ctx.cfg.out);
  simrag::RunStore store(ctx.cfg.out);
  auto runner = simrag::resumable_runner(store, ds, *provider, simrag::effective_config_json(ctx.cfg));
  const auto sizes = ctx.cfg.sample_sizes.empty() ? simrag::default_sample_sizes() : ctx.cfg.sample_sizes;
  const auto points = simrag::example_sweep(ctx.cfg.run, sizes, runner);

  simrag::write_sweep_csv(points, ctx.cfg.out / "example_sweep.csv");
  simrag::emit_example_plot(points, ctx.cfg.out / "example_sweep.svg");
  const bool any_ok = std::any_of(points.begin(), points.end(), [](const auto& p) { return p.cell.ok(); });
  if (any_ok) simrag::emit_scatter_panels(points, ctx.cfg.out / "example_scatter.svg");
  const auto meta = sweep_meta(ctx, *provider, ds, cells_json(points));
  simrag::write_file_atomic(ctx.cfg.out / "example_sweep.meta.json", simrag::dump_json(meta));
  for (const auto& p : points) {
    std::cout << "k=" << p.k << " "
              << (p.cell.ok() ? "pearson_r=" + fmt_r(p.cell.run->correlation.r) : "failed: " + p.cell.error)
              << "\n";
  }
  report_failures(meta);
  return 0;
}

int cmd_grid(const Context& ctx) {
  const auto ds = load_inputs(ctx.cfg);
  auto provider = make_provider(ctx.cfg, ds);
  simrag::DirectoryLock lock(ctx.cfg.out);
  simrag::RunStore store(ctx.cfg.out);
  auto runner = simrag::resumable_runner(store, ds, *provider, simrag::effective_config_json(ctx.cfg));
  const auto temps = ctx.cfg.temperatures.empty() ? simrag::default_temperatures() : ctx.cfg.temperatures;
  const auto sizes = ctx.cfg.sample_sizes.empty() ? simrag::default_sample_sizes() : ctx.cfg.sample_sizes;
  const auto grid = simrag::cross_factor_grid(ctx.cfg.run, temps, sizes, runner);

  simrag::write_grid_csv(grid, ctx.cfg.out / "grid.csv");
  simrag::emit_grid_heatmap(grid, ctx.cfg.out / "grid_heatmap.svg");

  std::vector<simrag::SweepPoint> flat;
  for (std::size_t i = 0; i < grid.temperatures.size(); ++i) {
    for (std::size_t j = 0; j < grid.sample_sizes.size(); ++j) {
      flat.push_back({grid.temperatures[i], grid.sample_sizes[j], grid.cells[i][j]});
    }
  }
  auto meta = sweep_meta(ctx, *provider, ds, cells_json(flat));
  if (const auto best = grid.argmax()) {
    meta["argmax"] = {{"temperature", best->temperature}, {"k", best->k}, {"pearson_r", best->r}};
    std::cout << "best: temperature=" << simrag::format_decimal(best->temperature) << " k=" << best->k
              << " pearson_r=" << fmt_r(best->r) << "\n";
  } else {
    meta["argmax"] = nullptr;
    std::cout << "best: none (every cell failed)\n";
  }
  simrag::write_file_atomic(ctx.cfg.out / "meta.json", simrag::dump_json(meta));
  std::cout << "cells=" << grid.temperatures.size() * grid.sample_sizes.size()
            << " failed=" << grid.failed_cells() << " grid=" << (ctx.cfg.out / "grid.csv").string() << "\n";
  report_failures(meta);
  return 0;
}

int cmd_baseline(const Context& ctx) {
  const auto ds = load_inputs(ctx.cfg);
  const auto& spec = ctx.cfg.baseline;
  const auto result = simrag::baseline_correlation(ds, spec);

  std::string name(simrag::to_string(spec.metric));
  if (spec.metric == simrag::Metric::qgram || spec.metric == simrag::Metric::cosine_qgram) {
    name += "_q" + std::to_string(spec.q);
  }
  if (spec.metric == simrag::Metric::jaccard_tokens) name += "_" + std::string(simrag::to_string(spec.tokenizer));
  const fs::path dir = ctx.cfg.out / "baselines" / name;
  simrag::DirectoryLock lock(ctx.cfg.out);

  std::string csv = simrag::csv::format_record({"id", "Sentence1", "Sentence2", "reference_score", "metric_value"});
  for (std::size_t i = 0; i < ds.test.size(); ++i) {
    const auto& p = ds.test[i];
    csv += simrag::csv::format_record({std::to_string(p.id), p.sentence1, p.sentence2,
                                       simrag::format_decimal(p.reference_score),
                                       simrag::format_decimal(result.metric_values[i])});
  }
  simrag::write_file_atomic(dir / "values.csv", csv);
  const json meta = {
      {"command", ctx.command},
      {"config", simrag::effective_config_json(ctx.cfg)},
      {"dataset_fingerprint", simrag::dataset_fingerprint(ds)},
      {"metric", std::string(simrag::to_string(spec.metric))},
      {"q", spec.q},
      {"tokenizer", std::string(simrag::to_string(spec.tokenizer))},
      {"pearson_r", result.correlation.r},
      {"n", result.correlation.n},
      {"timestamp", simrag::utc_timestamp()},
  };
  simrag::write_file_atomic(dir / "meta.json", simrag::dump_json(meta));
  std::cout << "metric=" << name << " pearson_r=" << fmt_r(result.correlation.r)
            << " n=" << result.correlation.n << "\n";
  return 0;
}

int cmd_report(const Context& ctx) {
  const auto& out = ctx.cfg.out;
  int emitted = 0;
  if (fs::is_regular_file(out / "grid.csv")) {
    simrag::emit_grid_heatmap(simrag::parse_grid_csv(simrag::read_text_file(out / "grid.csv")),
                              out / "grid_heatmap.svg");
    std::cout << (out / "grid_heatmap.svg").string() << "\n";
    ++emitted;
  }
  if (fs::is_regular_file(out / "temperature_sweep.csv")) {
    simrag::emit_temperature_plot(
        simrag::parse_grid_csv(simrag::read_text_file(out / "temperature_sweep.csv")),
        out / "temperature_sweep.svg");
    std::cout << (out / "temperature_sweep.svg").string() << "\n";
    ++emitted;
  }
  if (fs::is_regular_file(out / "example_sweep.csv")) {
    simrag::emit_example_plot(simrag::parse_grid_csv(simrag::read_text_file(out / "example_sweep.csv")),
                              out / "example_sweep.svg");
    std::cout << (out / "example_sweep.svg").string() << "\n";
    ++emitted;
    const auto meta_path = out / "example_sweep.meta.json";
    if (fs::is_regular_file(meta_path)) {
      const auto meta = json::parse(simrag::read_text_file(meta_path));
      simrag::RunStore store(out);
      std::vector<simrag::RunResult> runs;
      for (const auto& cell : meta.at("cells")) {
        if (!cell.contains("config_hash")) continue;
        if (auto run = store.load(cell.at("config_hash").get<std::string>())) runs.push_back(*run);
      }
      if (!runs.empty()) {
        simrag::emit_scatter_panels(runs, out / "example_scatter.svg");
        std::cout << (out / "example_scatter.svg").string() << "\n";
        ++emitted;
      }
    }
  }
  if (emitted == 0) {
    throw simrag::Error(simrag::ErrorCategory::data,
                        "nothing to report in " + out.string() +
                            " (expected grid.csv, temperature_sweep.csv or example_sweep.csv)");
  }
  return 0;
}

struct OptionSpec {
  const char* key;
  const char* flag;
  const char* help;
};

const std::vector<OptionSpec>& option_specs() {
  static const std::vector<OptionSpec> specs{
      {"dataset", "--dataset", "dataset path (file, or directory for pre-split)"},
      {"format", "--format", "single-file or pre-split"},
      {"provider", "--provider", "http or mock (default: http when SIMRAG_API_KEY is set)"},
      {"endpoint", "--endpoint", "OpenAI-compatible base URL"},
      {"model", "--model", "model name"},
      {"temperature", "--temperature", "sampling temperature in [0, 1]"},
      {"seed", "--seed", "model seed"},
      {"examples", "--examples", "few-shot examples in the system prompt"},
      {"selection_seed", "--selection-seed", "seed for sampling few-shot examples"},
      {"max_retries", "--max-retries", "re-asks after a malformed response"},
      {"parallelism", "--parallelism", "concurrent requests"},
      {"rate_limit", "--rate-limit", "requests per second, 0 for unlimited"},
      {"timeout_ms", "--timeout-ms", "HTTP timeout in milliseconds"},
      {"out", "--out", "output directory"},
      {"metric", "--metric", "levenshtein, jaccard_tokens, qgram, cosine_qgram"},
      {"q", "--q", "gram length for q-gram metrics"},
      {"tokenizer", "--tokenizer", "whitespace or lowercase_whitespace"},
      {"mock_table", "--mock-table", "mock score table (JSON)"},
      {"malformed_rate", "--malformed-rate", "mock: probability of a malformed response"},
      {"noise_sigma", "--noise-sigma", "mock: Gaussian noise on reported scores"},
      {"temperatures", "--temperatures", "comma-separated temperature list"},
      {"sizes", "--sizes", "comma-separated example-count list"},
  };
  return specs;
}

int exit_code_for(const simrag::Error& e) { return static_cast<int>(e.category()); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sentence-similarity benchmark harness for chat-completion models"};
  app.require_subcommand(1);
  app.fallthrough();

  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  for (const auto& spec : option_specs()) {
    options[spec.key] = app.add_option(spec.flag, values[spec.key], spec.help);
  }
  bool first_k = false;
  auto* first_k_opt = app.add_flag("--first-k", first_k, "use the first k train rows instead of sampling");
  std::string config_file;
  app.add_option("--config", config_file, "JSON config file (lowest precedence)");

  const std::map<std::string, std::string> commands{
      {"validate", "load the dataset and print split counts"},
      {"run", "score the test split once"},
      {"sweep-temp", "Pearson correlation across temperatures"},
      {"sweep-examples", "Pearson correlation across few-shot example counts"},
      {"grid", "temperature x example-count grid"},
      {"baseline", "string-similarity baseline correlation"},
      {"report", "regenerate SVG plots from an output directory"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  Context ctx;
  ctx.command = app.get_subcommands().front()->get_name();
  try {
    simrag::ConfigLayers layers;
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) layers.flags[key] = values[key];
    }
    if (first_k_opt->count() > 0) layers.flags["first_k"] = first_k ? "true" : "false";
    layers.env = simrag::process_env_layer();
    if (!config_file.empty()) layers.file = simrag::file_layer(fs::path(config_file));
    const char* key = std::getenv(simrag::kApiKeyEnv);
    ctx.cfg = simrag::resolve_cli_config(layers, key ? key : "");
  } catch (const simrag::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (ctx.command == "validate") return cmd_validate(ctx);
    if (ctx.command == "run") return cmd_run(ctx);
    if (ctx.command == "sweep-temp") return cmd_sweep_temp(ctx);
    if (ctx.command == "sweep-examples") return cmd_sweep_examples(ctx);
    if (ctx.command == "grid") return cmd_grid(ctx);
    if (ctx.command == "baseline") return cmd_baseline(ctx);
    if (ctx.command == "report") return cmd_report(ctx);
  } catch (const simrag::MalformedRow& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ctx.command == "validate" ? 1 : exit_code_for(e);
  } catch (const simrag::EmptySplit& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ctx.command == "validate" ? 1 : exit_code_for(e);
  } catch (const simrag::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 2;
}
