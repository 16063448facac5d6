#pragma once

#include <cmath>

// Double-double helpers for the oscillation-phase path. Large fields with
// slow relaxation give phases varpi*t up to ~1e7 rad, where plain double
// evaluation of cos(varpi*t) loses ~eps*phase absolute accuracy; carrying
// the low-order parts of a, varpi and the phase keeps the trig arguments
// accurate to roundoff after reduction mod 2*pi.

namespace bloch::detail {

struct DD {
  double hi = 0.0;
  double lo = 0.0;
};

inline DD two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline DD quick_two_sum(double a, double b) {
  const double s = a + b;
  return {s, b - (s - a)};
}

inline DD two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

inline DD dd_add(const DD& x, const DD& y) {
  DD s = two_sum(x.hi, y.hi);
  s.lo += x.lo + y.lo;
  return quick_two_sum(s.hi, s.lo);
}

inline DD dd_add_prod(const DD& acc, double a, double b) {
  return dd_add(acc, two_prod(a, b));
}

inline DD dd_mul_d(const DD& x, double s) {
  DD p = two_prod(x.hi, s);
  p.lo += x.lo * s;
  return quick_two_sum(p.hi, p.lo);
}

inline DD dd_sub(const DD& x, const DD& y) { return dd_add(x, {-y.hi, -y.lo}); }

inline DD dd_sqrt(const DD& x) {
  if (x.hi <= 0.0) return {0.0, 0.0};
  const double y = std::sqrt(x.hi);
  const double r = (std::fma(-y, y, x.hi) + x.lo) / (2.0 * y);
  return quick_two_sum(y, r);
}

inline constexpr double kTwoPiHi = 6.283185307179586232e+00;
inline constexpr double kTwoPiLo = 2.449293598294706414e-16;

/// Reduces x modulo 2*pi into approximately [-pi, pi].
inline double dd_reduce_two_pi(const DD& x) {
  const double n = std::nearbyint(x.hi / kTwoPiHi);
  DD red = dd_sub(x, dd_mul_d({kTwoPiHi, kTwoPiLo}, n));
  return red.hi + red.lo;
}

}  // namespace bloch::detail
