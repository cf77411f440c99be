#pragma once

// Closed-form reference values computed without the library.

#include <algorithm>
#include <cmath>

namespace oracle {

inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

inline double h(double p) { return -xlogx(p) - xlogx(1.0 - p); }

inline double kl(double p, double q) {
  double d = 0.0;
  if (p > 0.0) d += p * std::log(p / q);
  if (p < 1.0) d += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
  return d;
}

// I(X;Y) for X ~ Bern(p1) through a BSC(e).
inline double bsc_information(double p1, double e) {
  const double y1 = p1 * (1.0 - e) + (1.0 - p1) * e;
  return h(y1) - h(e);
}

// Largest log posterior/prior ratio for a BSC(e) under prior p1.
inline double bsc_i_max(double p1, double e) {
  const double y1 = p1 * (1.0 - e) + (1.0 - p1) * e;
  const double y0 = 1.0 - y1;
  const double r11 = p1 * (1.0 - e) / y1 / p1;
  const double r00 = (1.0 - p1) * (1.0 - e) / y0 / (1.0 - p1);
  const double r10 = (1.0 - p1) * e / y1 / (1.0 - p1);
  const double r01 = p1 * e / y0 / p1;
  return std::log(std::max({r11, r00, r10, r01}));
}

}  // namespace oracle
