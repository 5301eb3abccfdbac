#pragma once

#include <cmath>

// Brute-force reference values computed independently of the library.
namespace support {

// Σ_{n>=start} n^{-s} by direct summation to `terms`, plus the Euler-Maclaurin
// remainder ∫ + f/2 (error below s(s+1)/(12 n^{s+2}) at the cut).
inline double zeta_tail(double s, double start, long terms = 2'000'000) {
  const double n = start + static_cast<double>(terms);
  double sum = std::pow(n, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(n, -s);
  for (long i = terms - 1; i >= 0; --i) sum += std::pow(start + static_cast<double>(i), -s);  // small terms first
  return sum;
}

inline double pareto_bar(double alpha, double gamma, double k) { return std::pow(gamma / (k + gamma), alpha); }

}  // namespace support
