#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ihoc/basis.hpp"

namespace ihoc {

/// Equality-constrained NLP: minimize cost(z) subject to constraints(z) = 0.
struct NlpFunctions {
  int num_variables = 0;
  int num_constraints = 0;
  std::function<double(const Vec& z)> cost;
  std::function<Vec(const Vec& z)> constraints;
  /// grad cost(z) + J_c(z)^T r.
  std::function<Vec(const Vec& z, const Vec& r)> lagrangian_gradient;
};

struct SolverConfig {
  double outer_tol = 1e-12;       // change in augmented Lagrangian value
  double inner_grad_tol = 1e-9;   // sup-norm of the inner gradient
  int max_outer = 50;
  int max_inner = 500;
  double penalty_init = 10.0;
  double penalty_growth = 10.0;
  double constraint_tol = 1e-10;  // sup-norm of the constraint residual
  double kkt_tol = 1e-6;          // required for Converged
  double penalty_cap = 1e12;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

enum class SolveStatus { Converged, MaxIterations, LineSearchFailure };

std::string to_string(SolveStatus s);

struct SolveReport {
  Vec z;
  Vec multipliers;
  double cost = 0.0;
  int outer_iters = 0;
  int inner_iters_total = 0;
  double max_constraint_violation = 0.0;
  double kkt_residual = 0.0;
  double penalty = 0.0;
  SolveStatus status = SolveStatus::MaxIterations;
  bool degenerate = false;  // penalty hit the cap
  std::vector<double> violation_history;
};

/// Augmented Lagrangian with first-order multiplier updates, a BFGS inner
/// minimizer and a strong-Wolfe line search. Deterministic.
SolveReport solve(const NlpFunctions& nlp, const Vec& z0,
                  const SolverConfig& cfg = {});

/// Minimizer for the unconstrained inner problems.
struct InnerResult {
  Vec z;
  double value = 0.0;
  Vec gradient;
  int iterations = 0;
  bool converged = false;
  bool line_search_failed = false;
};

InnerResult bfgs_minimize(
    const std::function<double(const Vec&)>& f,
    const std::function<Vec(const Vec&)>& grad, const Vec& z0, double grad_tol,
    int max_iter);

}  // namespace ihoc
