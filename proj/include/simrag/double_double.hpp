#pragma once

// Double-double arithmetic (an unevaluated sum hi + lo of two doubles,
// about 106 significant bits) built only from IEEE double operations, so
// results are identical on every conforming platform. Requires FP
// contraction to be off (-ffp-contract=off); a fused multiply-add would
// change the error terms.

#include <cmath>

namespace simrag {

struct DoubleDouble {
  double hi = 0.0;
  double lo = 0.0;

  constexpr DoubleDouble() = default;
  constexpr DoubleDouble(double h) : hi(h), lo(0.0) {}  // NOLINT(google-explicit-constructor)
  constexpr DoubleDouble(double h, double l) : hi(h), lo(l) {}

  constexpr double to_double() const { return hi + lo; }
};

namespace dd {

constexpr DoubleDouble quick_two_sum(double a, double b) {
  const double s = a + b;
  return {s, b - (s - a)};
}

constexpr DoubleDouble two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

constexpr DoubleDouble split(double a) {
  constexpr double splitter = 134217729.0;  // 2^27 + 1
  const double t = splitter * a;
  const double hi = t - (t - a);
  return {hi, a - hi};
}

constexpr DoubleDouble two_prod(double a, double b) {
  const double p = a * b;
  const auto [ah, al] = split(a);
  const auto [bh, bl] = split(b);
  return {p, ((ah * bh - p) + ah * bl + al * bh) + al * bl};
}

}  // namespace dd

constexpr DoubleDouble operator+(DoubleDouble a, DoubleDouble b) {
  auto s = dd::two_sum(a.hi, b.hi);
  const auto t = dd::two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = dd::quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return dd::quick_two_sum(s.hi, s.lo);
}

constexpr DoubleDouble operator-(DoubleDouble a) { return {-a.hi, -a.lo}; }
constexpr DoubleDouble operator-(DoubleDouble a, DoubleDouble b) { return a + (-b); }

constexpr DoubleDouble operator*(DoubleDouble a, DoubleDouble b) {
  auto p = dd::two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return dd::quick_two_sum(p.hi, p.lo);
}

constexpr DoubleDouble operator/(DoubleDouble a, DoubleDouble b) {
  const double q1 = a.hi / b.hi;
  DoubleDouble r = a - b * DoubleDouble(q1);
  const double q2 = r.hi / b.hi;
  r = r - b * DoubleDouble(q2);
  const double q3 = r.hi / b.hi;
  return dd::quick_two_sum(q1, q2) + DoubleDouble(q3);
}

constexpr bool operator==(DoubleDouble a, DoubleDouble b) { return a.hi == b.hi && a.lo == b.lo; }

/// Square root by one Newton step on the double estimate (Karp).
inline DoubleDouble sqrt(DoubleDouble a) {
  if (a.hi <= 0.0) return {std::sqrt(a.hi), 0.0};
  const double x = 1.0 / std::sqrt(a.hi);
  const double ax = a.hi * x;
  const DoubleDouble residual = a - dd::two_prod(ax, ax);
  return dd::two_sum(ax, residual.hi * (x * 0.5));
}

}  // namespace simrag
