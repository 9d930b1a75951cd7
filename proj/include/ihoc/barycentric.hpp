#pragma once

#include <memory>

#include "ihoc/basis.hpp"

namespace ihoc {

enum class WeightScheme {
  Direct,   // product formula 1 / prod_{j != i} (tau_j - tau_i)
  ClosedForm,  // in terms of Christoffel numbers, no switching
  Switch1,  // closed form, half-angle sine near tau = 1
  Switch2,  // closed form, sin(acos) / sqrt(1 + tau) near tau = 1
};

inline constexpr double kDefaultSwitchEpsilon = 0.1;

/// Barycentric weights xi_i on a GGR grid. Only ratios matter.
struct BarycentricWeights {
  std::shared_ptr<const RadauGrid> grid;
  Vec xi;
  double epsilon = kDefaultSwitchEpsilon;
  WeightScheme scheme = WeightScheme::Switch2;

  int size() const { return static_cast<int>(xi.size()); }
  const Vec& nodes() const { return grid->nodes; }
};

/// Closed-form weights with no switching.
BarycentricWeights weights_thm(std::shared_ptr<const RadauGrid> grid);

enum class SwitchVariant { B1, B2 };

/// Closed-form weights, switching to a trigonometric form for |1 - tau_i| <=
/// epsilon. Throws DomainError unless 0 < epsilon < 1.
BarycentricWeights weights_switch(std::shared_ptr<const RadauGrid> grid,
                                  double epsilon = kDefaultSwitchEpsilon,
                                  SwitchVariant variant = SwitchVariant::B2);

/// Product-formula weights, accumulated in long double as sign and log
/// magnitude. Serves as the reference for the closed forms.
BarycentricWeights weights_direct(std::shared_ptr<const RadauGrid> grid);

/// Product-formula weights normalized so that xi_0 = -1 (long double).
Eigen::Matrix<long double, Eigen::Dynamic, 1> direct_weights_normalized(
    const Vec& nodes);

inline constexpr double kNodeSnap = 1e-15;

/// All Lagrange basis values L_{n,i}(tau) via the true barycentric formula.
/// Returns a unit vector when tau is within kNodeSnap of a node.
Vec lagrange_basis(const BarycentricWeights& w, double tau);

class RationalInterpolant {
 public:
  RationalInterpolant(BarycentricWeights weights, Vec values);

  double operator()(double tau) const;

  const BarycentricWeights& weights() const { return weights_; }
  const Vec& values() const { return values_; }

 private:
  BarycentricWeights weights_;
  Vec values_;
};

double interp_eval(const RationalInterpolant& ip, double tau);

/// Lebesgue function sum_i |L_{n,i}(tau)|.
double lebesgue_function(const BarycentricWeights& w, double tau);

/// Maximum of the Lebesgue function over [-1, 1 - 1e-12], sampled on
/// grid_density points then refined by golden-section search.
double lebesgue_constant(const BarycentricWeights& w, int grid_density);

}  // namespace ihoc
