#pragma once

// Small numeric helpers shared by the library modules.

namespace ihoc::special {

/// log|Gamma(x)|, reentrant.
double log_gamma(double x);

/// log(m!) for m >= 0.
double log_factorial(int m);

}  // namespace ihoc::special
