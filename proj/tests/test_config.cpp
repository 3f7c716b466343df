#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

using namespace simrag;

TEST(Config, EnvNames) {
  EXPECT_EQ(env_name("max_retries"), "SIMRAG_MAX_RETRIES");
  const std::map<std::string, std::string> fake{{"SIMRAG_SEED", "9"}, {"OTHER", "x"}};
  const auto env = env_layer([&](const char* name) -> const char* {
    auto it = fake.find(name);
    return it == fake.end() ? nullptr : it->second.c_str();
  });
  EXPECT_EQ(env, (std::map<std::string, std::string>{{"seed", "9"}}));
}

TEST(Config, PrecedenceProperty) {
  // For every key and every subset of layers that set it, the winner is
  // the highest-precedence layer present, else the built-in default.
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 500; ++trial) {
    ConfigLayers layers;
    std::optional<std::int64_t> flag, env, file;
    if (rng() % 2) layers.flags["seed"] = std::to_string(*(flag = static_cast<std::int64_t>(rng() % 1000)));
    if (rng() % 2) layers.env["seed"] = std::to_string(*(env = static_cast<std::int64_t>(rng() % 1000)));
    if (rng() % 2) layers.file["seed"] = std::to_string(*(file = static_cast<std::int64_t>(rng() % 1000)));
    const auto cfg = resolve_cli_config(layers);
    const std::int64_t expected = flag ? *flag : env ? *env : file ? *file : RunConfig{}.seed;
    ASSERT_EQ(cfg.run.seed, expected);
    if (flag) ASSERT_EQ(cfg.sources.at("seed"), ConfigSource::flag);
    else if (env) ASSERT_EQ(cfg.sources.at("seed"), ConfigSource::env);
    else if (file) ASSERT_EQ(cfg.sources.at("seed"), ConfigSource::file);
    else ASSERT_FALSE(cfg.sources.count("seed"));
  }
}

TEST(Config, FileLayer) {
  const auto layer = file_layer(nlohmann::json::parse(
      R"({"temperature": 0.5, "model": "m", "temperatures": [0, 0.5, 1], "first_k": true})"));
  EXPECT_EQ(layer.at("temperature"), "0.5");
  EXPECT_EQ(layer.at("temperatures"), "0,0.5,1");
  const auto cfg = resolve_cli_config(ConfigLayers{{}, {}, layer});
  EXPECT_EQ(cfg.run.temperature, 0.5);
  EXPECT_EQ(cfg.run.model_name, "m");
  EXPECT_EQ(cfg.temperatures, (std::vector<double>{0, 0.5, 1}));
  EXPECT_EQ(cfg.run.selection, SelectionMode::first_k);
  EXPECT_THROW(file_layer(nlohmann::json::parse(R"({"temprature": 0.5})")), ConfigError);
  EXPECT_THROW(file_layer(nlohmann::json::parse("[1]")), ConfigError);
}

TEST(Config, Validation) {
  auto with = [](std::string key, std::string value) {
    ConfigLayers l;
    l.flags[std::move(key)] = std::move(value);
    return l;
  };
  EXPECT_THROW(resolve_cli_config(with("temperature", "1.5")), ConfigError);
  EXPECT_THROW(resolve_cli_config(with("temperature", "warm")), ConfigError);
  EXPECT_THROW(resolve_cli_config(with("max_retries", "-1")), ConfigError);
  EXPECT_THROW(resolve_cli_config(with("examples", "-3")), ConfigError);
  EXPECT_THROW(resolve_cli_config(with("provider", "openai")), ConfigError);
  EXPECT_THROW(resolve_cli_config(with("metric", "bleu")), ConfigError);
  EXPECT_THROW(resolve_cli_config(with("q", "0")), ConfigError);
  EXPECT_THROW(resolve_cli_config(with("malformed_rate", "2")), ConfigError);
  EXPECT_THROW(resolve_cli_config(with("sizes", ",")), ConfigError);
  EXPECT_NO_THROW(resolve_cli_config(with("sizes", "0,10,70")));
}

TEST(Config, ProviderDefaultsToMockWithoutKey) {
  EXPECT_EQ(resolve_cli_config({}).effective_provider(), ProviderKind::mock);
  EXPECT_EQ(resolve_cli_config({}, "sk").effective_provider(), ProviderKind::http);
  ConfigLayers l;
  l.flags["provider"] = "mock";
  EXPECT_EQ(resolve_cli_config(l, "sk").effective_provider(), ProviderKind::mock);
}

TEST(Config, EffectiveJsonNeverHoldsKey) {
  const auto j = effective_config_json(resolve_cli_config({}, "sk-secret-value"));
  EXPECT_EQ(j.dump().find("sk-secret-value"), std::string::npos);
  EXPECT_EQ(j.at("api_key_present"), true);
}
