#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "simrag/double_double.hpp"
#include "simrag/error.hpp"

namespace simrag {

struct ScoreSeries {
  std::vector<double> values;
  std::string label;
};

struct CorrelationResult {
  double r = 0.0;
  std::size_t n = 0;         ///< paired observations used
  std::size_t excluded = 0;  ///< pairs dropped before correlating

  friend bool operator==(const CorrelationResult&, const CorrelationResult&) = default;
};

inline constexpr double kCorrelationOvershootTolerance = 1e-12;

/// Pearson product-moment correlation, two-pass mean-centred, accumulated in
/// double-double arithmetic so the result is bit-identical across platforms.
/// Throws LengthMismatch, TooFewObservations, or DegenerateVariance naming
/// the constant series.
inline CorrelationResult pearson(std::span<const double> x, std::span<const double> y,
                                 std::string_view x_label = "x",
                                 std::string_view y_label = "y") {
  if (x.size() != y.size()) throw LengthMismatch(x.size(), y.size());
  const std::size_t n = x.size();
  if (n < 2) throw TooFewObservations(n);

  // Exact constancy test; rounding in the centred sums could otherwise leave
  // a tiny nonzero variance and a meaningless r.
  auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double a) { return a == v.front(); });
  };
  if (constant(x)) throw DegenerateVariance(std::string(x_label));
  if (constant(y)) throw DegenerateVariance(std::string(y_label));

  DoubleDouble sum_x, sum_y;
  for (std::size_t i = 0; i < n; ++i) {
    sum_x = sum_x + x[i];
    sum_y = sum_y + y[i];
  }
  const DoubleDouble count(static_cast<double>(n));
  const DoubleDouble mean_x = sum_x / count;
  const DoubleDouble mean_y = sum_y / count;

  DoubleDouble sxy, sxx, syy;
  for (std::size_t i = 0; i < n; ++i) {
    const DoubleDouble dx = DoubleDouble(x[i]) - mean_x;
    const DoubleDouble dy = DoubleDouble(y[i]) - mean_y;
    sxy = sxy + dx * dy;
    sxx = sxx + dx * dx;
    syy = syy + dy * dy;
  }
  if (sxx.hi <= 0.0) throw DegenerateVariance(std::string(x_label));
  if (syy.hi <= 0.0) throw DegenerateVariance(std::string(y_label));

  double r = (sxy / sqrt(sxx * syy)).to_double();
  if (std::abs(r) > 1.0 && std::abs(r) - 1.0 <= kCorrelationOvershootTolerance) {
    r = std::copysign(1.0, r);
  }
  return CorrelationResult{r, n, 0};
}

inline CorrelationResult pearson(const ScoreSeries& x, const ScoreSeries& y) {
  return pearson(x.values, y.values, x.label, y.label);
}

}  // namespace simrag
