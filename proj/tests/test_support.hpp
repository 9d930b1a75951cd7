#pragma once

#include <algorithm>
#include <cmath>
#include <random>

namespace ihoc::test {

inline bool near_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

inline std::mt19937_64 rng(unsigned long long seed = 12345) {
  return std::mt19937_64(seed);
}

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

}  // namespace ihoc::test
