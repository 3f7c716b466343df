#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "test_support.hpp"

using namespace simrag;

namespace {

RunConfig base_config() {
  RunConfig c;
  c.parallelism = 1;
  return c;
}

}  // namespace

TEST(RunConfig, Validation) {
  RunConfig c;
  EXPECT_NO_THROW(c.validate());
  c.temperature = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
  c = RunConfig{};
  c.max_retries = -1;
  EXPECT_THROW(c.validate(), ConfigError);
  c.max_retries = kMaxRetriesLimit + 1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = RunConfig{};
  c.parallelism = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Mock, EchoReturnsReferenceScores) {
  const auto& ds = testing_support::fixture();
  MockProvider mock(MockConfig::echo(ds));
  for (const auto& p : ds.test) {
    const auto s = score_pair(mock, base_config(), "sys", p);
    EXPECT_EQ(s.model_score, p.reference_score);
    EXPECT_EQ(s.attempts, 1);
    EXPECT_FALSE(s.excluded);
  }
}

TEST(Mock, IgnoresTemperatureAndPrompts) {
  const auto& ds = testing_support::fixture();
  MockConfig cfg = MockConfig::echo(ds);
  cfg.noise_sigma = 0.5;
  MockProvider mock(cfg);
  ChatRequest a{"m", 0.0, 7, "sys", "user", ds.test[0].id, 1};
  ChatRequest b{"other", 0.9, 7, "different", "prompts", ds.test[0].id, 1};
  EXPECT_EQ(mock.complete(a), mock.complete(b));
  b.seed = 8;
  EXPECT_NE(mock.complete(a), mock.complete(b));
}

TEST(Mock, NoiseReplaysFromOracle) {
  const auto& ds = testing_support::fixture();
  MockConfig cfg = MockConfig::echo(ds);
  cfg.noise_sigma = 1.0;
  MockProvider mock(cfg);
  RunConfig rc = base_config();
  rc.seed = 123;
  for (const auto& p : ds.test) {
    const auto s = score_pair(mock, rc, "", p);
    EXPECT_EQ(*s.model_score, oracle::mock_noisy_score(p.reference_score, 1.0, 123, p.id));
  }
}

TEST(Mock, KeyedGaussianLooksStandardNormal) {
  double sum = 0, sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = keyed_gaussian(3, 1, static_cast<std::uint64_t>(i));
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.01);
}

TEST(Mock, MalformedRetriesAreDeterministic) {
  const auto& ds = testing_support::fixture();
  MockConfig cfg = MockConfig::echo(ds);
  cfg.malformed_rate = 0.5;
  RunConfig rc = base_config();
  rc.max_retries = 10;

  MockProvider first(cfg), second(cfg);
  int retried = 0;
  for (const auto& p : ds.test) {
    const auto a = score_pair(first, rc, "", p);
    const auto b = score_pair(second, rc, "", p);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.model_score, p.reference_score);
    // Replay the malformed draws: the attempt count is the first clean one.
    int expected = 1;
    while (to_unit(hash_words(static_cast<std::uint64_t>(rc.seed), 2, static_cast<std::uint64_t>(p.id),
                              static_cast<std::uint64_t>(expected))) < 0.5) {
      ++expected;
    }
    EXPECT_EQ(a.attempts, expected);
    retried += a.attempts > 1;
  }
  EXPECT_GT(retried, 0);
  EXPECT_EQ(first.calls(), second.calls());
}

TEST(Mock, ExhaustionAfterMaxRetriesPlusOne) {
  const auto& ds = testing_support::fixture();
  MockConfig cfg = MockConfig::echo(ds);
  cfg.malformed_rate = 1.0;
  MockProvider mock(cfg);
  RunConfig rc = base_config();
  rc.max_retries = 2;
  try {
    score_pair(mock, rc, "", ds.test[0]);
    FAIL();
  } catch (const FormatExhausted& e) {
    EXPECT_EQ(e.attempts(), 3);
    EXPECT_EQ(e.pair_id(), ds.test[0].id);
    EXPECT_EQ(e.last_response(), kMockMalformedResponse);
  }
  EXPECT_EQ(mock.calls(), 3u);
}

TEST(Mock, UnknownPairIsProviderError) {
  MockProvider mock(MockConfig{});
  SentencePair p{5, "a", "b", 1};
  EXPECT_THROW(score_pair(mock, base_config(), "", p), ProviderError);
}

TEST(Mock, ConfigJsonRoundTrip) {
  MockConfig cfg;
  cfg.scores = {{0, 1.5}, {7, 4.0}};
  cfg.malformed_rate = 0.25;
  cfg.noise_sigma = 0.1;
  const auto again = MockConfig::from_json(cfg.to_json());
  EXPECT_EQ(again.scores, cfg.scores);
  EXPECT_EQ(again.malformed_rate, 0.25);
  EXPECT_EQ(again.noise_sigma, 0.1);
  EXPECT_EQ(MockProvider(cfg).fingerprint(), MockProvider(again).fingerprint());
  cfg.noise_sigma = 0.2;
  EXPECT_NE(MockProvider(cfg).fingerprint(), MockProvider(again).fingerprint());
  EXPECT_THROW(MockConfig::from_json(nlohmann::json::parse(R"({"scores":{"x":1}})")), ConfigError);
}
