#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "test_support.hpp"

using namespace simrag;

TEST(Stats, SmallCaseMatchesOracle) {
  const std::vector<double> x{1, 2, 3}, y{1, 2, 4};
  const auto r = pearson(x, y);
  EXPECT_NEAR(r.r, oracle::pearson(x, y), 1e-12);
  // 3/sqrt(2 * 14/3) worked by hand
  EXPECT_NEAR(r.r, 3.0 / std::sqrt(28.0 / 3.0), 1e-15);
  EXPECT_EQ(r.n, 3u);
  EXPECT_EQ(r.excluded, 0u);
}

TEST(Stats, SelfAndAntiCorrelationAreExact) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const auto x = testing_support::random_series(rng, 2 + rng() % 99);
    std::vector<double> flipped(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) flipped[j] = 4.0 - x[j];
    EXPECT_EQ(pearson(x, x).r, 1.0);
    EXPECT_EQ(pearson(x, flipped).r, -1.0);
  }
}

TEST(Stats, FuzzAgainstOracle) {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 300; ++i) {
    const std::size_t n = 2 + rng() % 99;
    const auto x = testing_support::random_series(rng, n);
    const auto y = testing_support::random_series(rng, n);
    const double r = pearson(x, y).r;
    ASSERT_NEAR(r, oracle::pearson(x, y), 1e-12);
    ASSERT_LE(std::abs(r), 1.0 + 1e-12);
  }
}

TEST(Stats, Properties) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> scale(0.01, 100.0), shift(-50.0, 50.0);
  for (int i = 0; i < 300; ++i) {
    const std::size_t n = 2 + rng() % 99;
    const auto x = testing_support::random_series(rng, n);
    const auto y = testing_support::random_series(rng, n);
    const double r = pearson(x, y).r;
    EXPECT_EQ(pearson(y, x).r, r);

    const double a = scale(rng), b = shift(rng);
    std::vector<double> ax(n), neg(n);
    for (std::size_t j = 0; j < n; ++j) {
      ax[j] = a * x[j] + b;
      neg[j] = -x[j];
    }
    EXPECT_NEAR(pearson(ax, y).r, r, 1e-12);
    EXPECT_NEAR(pearson(neg, y).r, -r, 1e-12);
  }
}

TEST(Stats, Errors) {
  const std::vector<double> x{1, 2, 3}, c{2, 2, 2}, two{1, 2};
  try {
    pearson(c, x, "model", "reference");
    FAIL();
  } catch (const DegenerateVariance& e) {
    EXPECT_EQ(e.which(), "model");
    EXPECT_EQ(e.category(), ErrorCategory::statistics);
  }
  try {
    pearson(x, c, "reference", "model");
    FAIL();
  } catch (const DegenerateVariance& e) {
    EXPECT_EQ(e.which(), "model");
  }
  EXPECT_THROW(pearson(x, two), LengthMismatch);
  EXPECT_THROW(pearson(std::vector<double>{1}, std::vector<double>{2}), TooFewObservations);
  EXPECT_THROW(pearson(std::vector<double>{}, std::vector<double>{}), TooFewObservations);
}

TEST(Stats, TwoPointsArePerfectlyCorrelated) {
  EXPECT_EQ(pearson(std::vector<double>{0.3, 3.9}, std::vector<double>{1.1, 2.0}).r, 1.0);
  EXPECT_EQ(pearson(std::vector<double>{0.3, 3.9}, std::vector<double>{2.0, 1.1}).r, -1.0);
}

TEST(Stats, ScoreSeriesOverload) {
  ScoreSeries x{{1, 2, 3, 4}, "reference"}, y{{1, 3, 2, 4}, "model"};
  EXPECT_EQ(pearson(x, y).r, pearson(x.values, y.values).r);
}

TEST(DoubleDouble, ArithmeticIsExactBeyondDouble) {
  // 1 + 2^-80 survives in the low word and cancels back out exactly.
  const DoubleDouble one(1.0), tiny(std::ldexp(1.0, -80));
  const DoubleDouble s = one + tiny;
  EXPECT_EQ(s.hi, 1.0);
  EXPECT_EQ(s.lo, std::ldexp(1.0, -80));
  EXPECT_EQ((s - one).to_double(), std::ldexp(1.0, -80));
  const DoubleDouble third = DoubleDouble(1.0) / DoubleDouble(3.0);
  EXPECT_NEAR(((third * DoubleDouble(3.0)) - one).to_double(), 0.0, 1e-30);
  const DoubleDouble root = sqrt(DoubleDouble(2.0));
  EXPECT_NEAR(((root * root) - DoubleDouble(2.0)).to_double(), 0.0, 1e-30);
}
