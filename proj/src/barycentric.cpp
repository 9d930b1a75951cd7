#include "ihoc/barycentric.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ihoc/errors.hpp"

namespace ihoc {

namespace {

double alternating_sign(int i) { return (i - 1) % 2 == 0 ? 1.0 : -1.0; }

double first_weight(const RadauGrid& g) {
  const double radicand = (2.0 * g.alpha() + 1.0) * g.christoffel[0];
  if (!(radicand >= 0.0)) {
    throw DomainError("negative radicand in xi_0; Christoffel numbers corrupt");
  }
  return -std::sqrt(radicand);
}

double interior_weight(const RadauGrid& g, int i) {
  const double radicand = (1.0 - g.nodes[i]) * g.christoffel[i];
  if (!(radicand >= 0.0)) {
    std::ostringstream msg;
    msg << "negative radicand in xi_" << i;
    throw DomainError(msg.str());
  }
  return alternating_sign(i) * std::sqrt(radicand);
}

void require_grid(const std::shared_ptr<const RadauGrid>& grid) {
  if (!grid) throw std::invalid_argument("null grid");
}

}  // namespace

BarycentricWeights weights_thm(std::shared_ptr<const RadauGrid> grid) {
  require_grid(grid);
  BarycentricWeights w;
  w.scheme = WeightScheme::ClosedForm;
  w.xi.resize(grid->size());
  w.xi[0] = first_weight(*grid);
  for (int i = 1; i <= grid->n; ++i) w.xi[i] = interior_weight(*grid, i);
  w.grid = std::move(grid);
  return w;
}

BarycentricWeights weights_switch(std::shared_ptr<const RadauGrid> grid,
                                  double epsilon, SwitchVariant variant) {
  require_grid(grid);
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    std::ostringstream msg;
    msg << "switching parameter must satisfy 0 < epsilon < 1, got " << epsilon;
    throw DomainError(msg.str());
  }
  const RadauGrid& g = *grid;
  BarycentricWeights w;
  w.epsilon = epsilon;
  w.scheme = variant == SwitchVariant::B1 ? WeightScheme::Switch1
                                          : WeightScheme::Switch2;
  w.xi.resize(g.size());
  w.xi[0] = first_weight(g);
  for (int i = 1; i <= g.n; ++i) {
    const double tau = g.nodes[i];
    if (std::abs(1.0 - tau) > epsilon) {
      w.xi[i] = interior_weight(g, i);
    } else if (variant == SwitchVariant::B1) {
      w.xi[i] = alternating_sign(i) * std::sin(0.5 * std::acos(tau)) *
                std::sqrt(2.0 * g.christoffel[i]);
    } else {
      w.xi[i] = alternating_sign(i) * std::sin(std::acos(tau)) *
                std::sqrt(g.christoffel[i] / (1.0 + tau));
    }
  }
  w.grid = std::move(grid);
  return w;
}

Eigen::Matrix<long double, Eigen::Dynamic, 1> direct_weights_normalized(
    const Vec& nodes) {
  const int m = static_cast<int>(nodes.size());
  Eigen::Matrix<long double, Eigen::Dynamic, 1> log_mag(m), sign(m), out(m);
  for (int i = 0; i < m; ++i) {
    long double lm = 0.0L;
    long double s = 1.0L;
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      const long double d = static_cast<long double>(nodes[j]) -
                            static_cast<long double>(nodes[i]);
      lm -= std::log(std::abs(d));
      if (d < 0) s = -s;
    }
    log_mag[i] = lm;
    sign[i] = s;
  }
  for (int i = 0; i < m; ++i) {
    out[i] = -sign[i] * sign[0] * std::exp(log_mag[i] - log_mag[0]);
  }
  return out;
}

BarycentricWeights weights_direct(std::shared_ptr<const RadauGrid> grid) {
  require_grid(grid);
  const Vec& x = grid->nodes;
  const int m = static_cast<int>(x.size());
  BarycentricWeights w;
  w.scheme = WeightScheme::Direct;
  w.xi.resize(m);
  for (int i = 0; i < m; ++i) {
    long double lm = 0.0L;
    long double s = 1.0L;
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      const long double d =
          static_cast<long double>(x[j]) - static_cast<long double>(x[i]);
      lm -= std::log(std::abs(d));
      if (d < 0) s = -s;
    }
    w.xi[i] = static_cast<double>(s * std::exp(lm));
  }
  w.grid = std::move(grid);
  return w;
}

Vec lagrange_basis(const BarycentricWeights& w, double tau) {
  const Vec& x = w.nodes();
  const int m = static_cast<int>(x.size());
  Vec out = Vec::Zero(m);
  for (int i = 0; i < m; ++i) {
    if (tau == x[i] || std::abs(tau - x[i]) <= kNodeSnap) {
      out[i] = 1.0;
      return out;
    }
  }
  double denom = 0.0;
  for (int i = 0; i < m; ++i) {
    out[i] = w.xi[i] / (tau - x[i]);
    denom += out[i];
  }
  out /= denom;
  return out;
}

RationalInterpolant::RationalInterpolant(BarycentricWeights weights, Vec values)
    : weights_(std::move(weights)), values_(std::move(values)) {
  if (values_.size() != weights_.xi.size()) {
    throw DimensionError("interpolant values and weights differ in length");
  }
}

double RationalInterpolant::operator()(double tau) const {
  const Vec& x = weights_.nodes();
  const Vec& xi = weights_.xi;
  const int m = static_cast<int>(x.size());
  for (int i = 0; i < m; ++i) {
    if (tau == x[i] || std::abs(tau - x[i]) <= kNodeSnap) return values_[i];
  }
  double num = 0.0, den = 0.0;
  for (int i = 0; i < m; ++i) {
    const double q = xi[i] / (tau - x[i]);
    num += q * values_[i];
    den += q;
  }
  return num / den;
}

double interp_eval(const RationalInterpolant& ip, double tau) { return ip(tau); }

double lebesgue_function(const BarycentricWeights& w, double tau) {
  return lagrange_basis(w, tau).cwiseAbs().sum();
}

double lebesgue_constant(const BarycentricWeights& w, int grid_density) {
  const Vec& x = w.nodes();
  const int m = static_cast<int>(x.size());
  if (m == 1) return 1.0;
  constexpr double kRight = 1.0 - 1e-12;

  // Sample every gap between consecutive nodes (and the last node to kRight)
  // uniformly; node clustering makes a global uniform grid miss the ends.
  const int per_gap = std::max(4, grid_density / m);
  double best = 1.0;
  double best_lo = x[0], best_hi = x[0];
  for (int g = 0; g < m; ++g) {
    const double lo = x[g];
    const double hi = g + 1 < m ? x[g + 1] : kRight;
    const double h = (hi - lo) / per_gap;
    for (int s = 1; s <= per_gap; ++s) {
      const double t = s == per_gap ? hi : lo + s * h;
      const double v = lebesgue_function(w, t);
      if (v > best) {
        best = v;
        best_lo = std::max(lo, t - h);
        best_hi = std::min(hi, t + h);
      }
    }
  }
  if (best_hi <= best_lo) return best;

  // Golden-section refinement of the bracket around the best sample.
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = best_lo, b = best_hi;
  double c = b - ratio * (b - a), d = a + ratio * (b - a);
  double fc = lebesgue_function(w, c), fd = lebesgue_function(w, d);
  for (int it = 0; it < 100 && (b - a) > 1e-15 * (1.0 + std::abs(a)); ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = lebesgue_function(w, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = lebesgue_function(w, d);
    }
  }
  return std::max({best, fc, fd});
}

}  // namespace ihoc
