#include "ihoc/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "ihoc/errors.hpp"
#include "ihoc/special.hpp"

namespace ihoc {

using special::log_gamma;

GegenbauerBasis::GegenbauerBasis(double alpha) : alpha_(alpha) {
  if (!(alpha > -0.5) || !std::isfinite(alpha)) {
    std::ostringstream msg;
    msg << "Gegenbauer index must satisfy alpha > -1/2, got " << alpha;
    throw DomainError(msg.str());
  }
}

// Normalized recurrence (G_n(1) = 1), accumulated in long double:
//   (k + 2a) G_{k+1} = 2 (k + a) x G_k - k G_{k-1},  k >= 1,
// with G_0 = 1 and G_1 = x.
void GegenbauerBasis::eval_with_derivative(int n, double tau, double& value,
                                           double& derivative) const {
  if (n < 0) throw DomainError("polynomial degree must be nonnegative");
  if (n == 0) {
    value = 1.0;
    derivative = 0.0;
    return;
  }
  const long double x = tau, a = alpha_;
  long double p_prev = 1.0L, d_prev = 0.0L;
  long double p = x, d = 1.0L;
  for (int k = 1; k < n; ++k) {
    const long double denom = k + 2.0L * a;
    const long double c = 2.0L * (k + a);
    const long double p_next = (c * x * p - k * p_prev) / denom;
    const long double d_next = (c * (p + x * d) - k * d_prev) / denom;
    p_prev = p;
    d_prev = d;
    p = p_next;
    d = d_next;
  }
  value = static_cast<double>(p);
  derivative = static_cast<double>(d);
}

double GegenbauerBasis::eval(int n, double tau) const {
  double v = 0.0, d = 0.0;
  eval_with_derivative(n, tau, v, d);
  return v;
}

void GegenbauerBasis::radau_poly_with_derivative(int n, double tau,
                                                 double& value,
                                                 double& derivative) const {
  // Run the recurrence once to degree n + 1 and keep the last two terms.
  if (n < 0) throw DomainError("polynomial degree must be nonnegative");
  const long double x = tau, a = alpha_;
  long double p_prev = 1.0L, d_prev = 0.0L;
  long double p = x, d = 1.0L;
  for (int k = 1; k <= n; ++k) {
    const long double denom = k + 2.0L * a;
    const long double c = 2.0L * (k + a);
    const long double p_next = (c * x * p - k * p_prev) / denom;
    const long double d_next = (c * (p + x * d) - k * d_prev) / denom;
    p_prev = p;
    d_prev = d;
    p = p_next;
    d = d_next;
  }
  value = static_cast<double>(p_prev + p);
  derivative = static_cast<double>(d_prev + d);
}

double GegenbauerBasis::radau_poly(int n, double tau) const {
  double v = 0.0, d = 0.0;
  radau_poly_with_derivative(n, tau, v, d);
  return v;
}

double GegenbauerBasis::lambda_norm(int j) const {
  if (j < 0) throw DomainError("lambda_norm index must be nonnegative");
  const double a = alpha_;
  double log_value = 0.0;
  if (j == 0) {
    // (j + a) Gamma(j + 2a) -> Gamma(2a + 1) / 2 at j = 0.
    log_value = 2.0 * a * std::log(2.0) + 2.0 * log_gamma(a + 0.5) -
                log_gamma(2.0 * a + 1.0);
  } else {
    log_value = (2.0 * a - 1.0) * std::log(2.0) + special::log_factorial(j) +
                2.0 * log_gamma(a + 0.5) - std::log(j + a) -
                log_gamma(j + 2.0 * a);
  }
  const double value = std::exp(log_value);
  if (!std::isfinite(value) || value <= 0.0) {
    throw RangeError("lambda_norm overflow");
  }
  return value;
}

double GegenbauerBasis::leading_coefficient(int n) const {
  if (n < 0) throw DomainError("polynomial degree must be nonnegative");
  if (n == 0) return 1.0;
  const double a = alpha_;
  const double log_value = (n - 1) * std::log(2.0) + log_gamma(n + a) +
                           log_gamma(2.0 * a + 1.0) - log_gamma(n + 2.0 * a) -
                           log_gamma(a + 1.0);
  const double value = std::exp(log_value);
  if (!std::isfinite(value)) throw RangeError("leading coefficient overflow");
  return value;
}

double eval_gegenbauer(const GegenbauerBasis& basis, int n, double tau) {
  return basis.eval(n, tau);
}

double lambda_norm(const GegenbauerBasis& basis, int j) {
  return basis.lambda_norm(j);
}

namespace {

// Newton iteration on p(x) / prod(x - r_i) for the known roots r_i; keeps the
// iterate inside (lo, hi) by bisecting toward the violated boundary.
template <typename Eval>
double deflated_newton(const Eval& eval, double seed,
                       const std::vector<double>& known, double lo, double hi,
                       const RootOptions& opts, bool& converged) {
  double x = seed;
  converged = false;
  for (int it = 0; it < opts.max_iter; ++it) {
    double p = 0.0, dp = 0.0;
    eval(x, p, dp);
    double s = 0.0;
    for (double r : known) s += 1.0 / (x - r);
    const double denom = dp - p * s;
    if (denom == 0.0 || !std::isfinite(denom)) break;
    const double step = p / denom;
    double next = x - step;
    if (!(next > lo)) next = 0.5 * (x + lo);
    if (!(next < hi)) next = 0.5 * (x + hi);
    const double moved = std::abs(next - x);
    x = next;
    if (moved <= opts.step_tol) {
      converged = true;
      break;
    }
  }
  return x;
}

// Plain Newton polish; at most a few steps once deflation has isolated the
// root.
template <typename Eval>
double polish(const Eval& eval, double x, double lo, double hi) {
  for (int it = 0; it < 4; ++it) {
    double p = 0.0, dp = 0.0;
    eval(x, p, dp);
    if (dp == 0.0) break;
    const double next = x - p / dp;
    if (!(next > lo && next < hi)) break;
    const double moved = std::abs(next - x);
    x = next;
    if (moved <= 1e-16 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

}  // namespace

RadauGrid ggr_nodes(const GegenbauerBasis& basis, int n,
                    const RootOptions& opts) {
  if (n < 0) throw DomainError("grid index n must be nonnegative");
  RadauGrid grid;
  grid.basis = basis;
  grid.n = n;
  grid.nodes.resize(n + 1);
  grid.nodes[0] = -1.0;

  auto eval = [&](double x, double& p, double& dp) {
    basis.radau_poly_with_derivative(n, x, p, dp);
  };

  // Seeds: Chebyshev-Gauss-Radau nodes -cos(2 k pi / (2n + 1)), k = 1..n.
  std::vector<double> known{-1.0};
  known.reserve(n + 1);
  for (int k = n; k >= 1; --k) {
    const double seed =
        -std::cos(2.0 * k * std::numbers::pi / (2.0 * n + 1.0));
    bool converged = false;
    double root = deflated_newton(eval, seed, known, -1.0, 1.0, opts,
                                  converged);
    if (!converged) {
      double p = 0.0, dp = 0.0;
      eval(root, p, dp);
      if (!(std::abs(p) <= 1e-12 * std::max(1.0, std::abs(dp)))) {
        std::ostringstream msg;
        msg << "GGR root " << k << " failed to converge (n=" << n
            << ", alpha=" << basis.alpha() << ")";
        throw ConvergenceError(msg.str());
      }
    }
    known.push_back(root);
  }
  std::vector<double> roots(known.begin() + 1, known.end());
  std::sort(roots.begin(), roots.end());
  for (int k = 0; k < n; ++k) {
    const double lo = k == 0 ? -1.0 : roots[k - 1];
    const double hi = k + 1 < n ? roots[k + 1] : 1.0;
    grid.nodes[k + 1] = polish(eval, roots[k], lo, hi);
  }
  for (int k = 0; k < n; ++k) {
    if (!(grid.nodes[k] < grid.nodes[k + 1])) {
      std::ostringstream msg;
      msg << "GGR nodes not strictly increasing at index " << k + 1
          << " (n=" << n << ", alpha=" << basis.alpha() << ")";
      throw ConvergenceError(msg.str());
    }
  }
  if (n > 0 && !(grid.nodes[n] < 1.0)) {
    throw ConvergenceError("GGR node escaped to tau = 1");
  }

  // Christoffel numbers.
  const double a = basis.alpha();
  const double log_prefactor = (2.0 * a - 1.0) * std::log(2.0) +
                               2.0 * log_gamma(a + 0.5) +
                               special::log_factorial(n) -
                               std::log(n + a + 0.5) -
                               log_gamma(n + 2.0 * a + 1.0);
  const double prefactor = std::exp(log_prefactor);
  if (!std::isfinite(prefactor)) throw RangeError("Christoffel prefactor");
  grid.theta.resize(n + 1);
  grid.christoffel.resize(n + 1);
  for (int j = 0; j <= n; ++j) {
    const double g = basis.eval(n, grid.nodes[j]);
    grid.theta[j] = prefactor * (1.0 - grid.nodes[j]) / (g * g);
    grid.christoffel[j] = grid.theta[j];
  }
  grid.christoffel[0] = (a + 0.5) * grid.theta[0];
  return grid;
}

void legendre_with_derivative(int m, double x, double& value,
                              double& derivative) {
  double p_prev = 1.0;
  double p = x;
  if (m == 0) {
    value = 1.0;
    derivative = 0.0;
    return;
  }
  for (int k = 1; k < m; ++k) {
    const double next = ((2.0 * k + 1.0) * x * p - k * p_prev) / (k + 1.0);
    p_prev = p;
    p = next;
  }
  value = p;
  // Valid for |x| < 1; Gauss nodes never touch the endpoints.
  derivative = m * (x * p - p_prev) / (x * x - 1.0);
}

LegendreGaussRule lg_rule(int order, const RootOptions& opts) {
  if (order < 0) throw DomainError("LG order must be nonnegative");
  const int m = order + 1;
  LegendreGaussRule rule;
  rule.order = order;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  for (int k = 0; k < (m + 1) / 2; ++k) {
    double x = std::cos(std::numbers::pi * (k + 0.75) / (m + 0.5));
    double p = 0.0, dp = 0.0;
    bool converged = false;
    for (int it = 0; it < opts.max_iter; ++it) {
      legendre_with_derivative(m, x, p, dp);
      const double step = p / dp;
      x -= step;
      if (std::abs(step) <= opts.step_tol) {
        converged = true;
        break;
      }
    }
    if (!converged) throw ConvergenceError("Legendre-Gauss root iteration");
    legendre_with_derivative(m, x, p, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Descending x from the cosine seeds; mirror into ascending order.
    rule.nodes[k] = -x;
    rule.nodes[m - 1 - k] = x;
    rule.weights[k] = w;
    rule.weights[m - 1 - k] = w;
  }
  if (m % 2 == 1) rule.nodes[m / 2] = 0.0;
  return rule;
}

}  // namespace ihoc
