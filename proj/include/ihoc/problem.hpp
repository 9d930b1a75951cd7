#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ihoc/basis.hpp"

namespace ihoc {

/// Closed-form optimal trajectory of a benchmark problem.
struct ExactSolution {
  std::function<Vec(double)> state;
  std::function<Vec(double)> control;
  double cost = 0.0;
};

/// Infinite-horizon problem: minimize int_0^inf g(x, u) dt subject to
/// x' = f(x, u), x(0) = x0. Callables must be pure.
struct IhocProblem {
  using Dynamics = std::function<Vec(const Vec& x, const Vec& u)>;
  using RunningCost = std::function<double(const Vec& x, const Vec& u)>;
  using DynamicsJacobian =
      std::function<void(const Vec& x, const Vec& u, Mat& fx, Mat& fu)>;
  using CostGradient =
      std::function<void(const Vec& x, const Vec& u, Vec& gx, Vec& gu)>;

  std::string name;
  int nx = 0;
  int nu = 0;
  Vec x0;
  Dynamics dynamics;
  RunningCost running_cost;
  DynamicsJacobian jac_dynamics;  // optional
  CostGradient grad_cost;         // optional
  /// Optional predicate for states where f and g are defined without
  /// clamping.
  std::function<bool(const Vec& x)> in_domain;
  std::optional<ExactSolution> exact;

  bool has_jacobians() const {
    return static_cast<bool>(jac_dynamics) && static_cast<bool>(grad_cost);
  }
};

/// Checks output dimensions and, when supplied, the analytic Jacobians against
/// central differences (1e-5 relative) at 20 deterministic random points.
/// Throws std::invalid_argument on failure.
void validate_problem(const IhocProblem& p);

enum class Example1Form { A, B };

IhocProblem example1(Example1Form form);
IhocProblem example2();

/// Registry lookup: "example1-a", "example1-b", "example2".
IhocProblem make_problem(std::string_view name);
std::vector<std::string> problem_names();

/// Exact states (nx x T) and controls (nu x T) on a time grid.
std::pair<Mat, Mat> eval_exact(const ExactSolution& sol,
                               const std::vector<double>& t_grid);

namespace example2_data {
/// Closed-loop matrix and feedback gain of the LQR benchmark.
Eigen::Matrix2d closed_loop();
Eigen::RowVector2d gain();
inline constexpr double kOptimalCost = 19.85335656362790;
}  // namespace example2_data

inline constexpr double kExample1OptimalCost = 0.5799580911421756;

}  // namespace ihoc
