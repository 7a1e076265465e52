#pragma once

// Error-free transformations and a minimal double-double accumulator.
// Used wherever a quantity must be formed at twice the working precision
// (right-hand sides of generated problems, floor vectors).

#include <cmath>

namespace cglab::dd {

struct DoubleDouble {
  double hi = 0.0;
  double lo = 0.0;

  double value() const { return hi + lo; }
};

/// a + b = s + e exactly.
inline DoubleDouble two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  const double e = (a - (s - bb)) + (b - bb);
  return {s, e};
}

inline DoubleDouble quick_two_sum(double a, double b) {
  const double s = a + b;
  return {s, b - (s - a)};
}

/// a * b = p + e exactly (barring overflow/underflow).
inline DoubleDouble two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

inline DoubleDouble add(DoubleDouble a, DoubleDouble b) {
  DoubleDouble s = two_sum(a.hi, b.hi);
  DoubleDouble t = two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return quick_two_sum(s.hi, s.lo);
}

inline DoubleDouble add(DoubleDouble a, double b) { return add(a, DoubleDouble{b, 0.0}); }

/// Accumulates x*y into acc without losing the product's low part.
inline DoubleDouble fma_acc(DoubleDouble acc, double x, double y) {
  return add(acc, two_prod(x, y));
}

inline DoubleDouble mul(DoubleDouble a, double b) {
  DoubleDouble p = two_prod(a.hi, b);
  p.lo += a.lo * b;
  return quick_two_sum(p.hi, p.lo);
}

}  // namespace cglab::dd
