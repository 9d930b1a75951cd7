#include "ihoc/special.hpp"

#include <cmath>

namespace ihoc::special {

double log_gamma(double x) {
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

double log_factorial(int m) { return log_gamma(static_cast<double>(m) + 1.0); }

}  // namespace ihoc::special
