#pragma once

#include <memory>
#include <vector>

#include "ihoc/barycentric.hpp"
#include "ihoc/maps.hpp"
#include "ihoc/operators.hpp"
#include "ihoc/problem.hpp"
#include "ihoc/solver.hpp"

namespace ihoc {

/// Grid, barycentric weights and integration matrix for one (alpha, n).
struct Discretization {
  std::shared_ptr<const RadauGrid> grid;
  BarycentricWeights weights;
  IntegrationMatrix grim;

  int n() const { return grid->n; }
  double alpha() const { return grid->alpha(); }
};

Discretization discretize(double alpha, int n,
                          double epsilon = kDefaultSwitchEpsilon,
                          SwitchVariant variant = SwitchVariant::B2);

/// Generic multiplies the integrands by T'(tau_j). Factored folds T' into a
/// division by (1 - tau)^2 (algebraic map, prefactor 2L) or by (1 - tau)
/// (logarithmic map, prefactor L).
enum class TranscriptionForm { Generic, Factored };

/// Named initial guesses: every decision variable set to 1 or to 0.5.
enum class GuessPreset { Ones, Half };

GuessPreset parse_guess_preset(std::string_view name);
std::string to_string(GuessPreset g);
std::string to_string(TranscriptionForm f);

/// Nodal and resampled solution on [0, inf).
struct Trajectory {
  Vec tau_nodes;
  Vec t_nodes;
  Mat states;    // nx x (n + 1), column 0 is x0
  Mat controls;  // nu x (n + 1)
  double J_n = 0.0;
  std::vector<double> t_eval;
  Mat states_eval;    // nx x t_eval.size()
  Mat controls_eval;  // nu x t_eval.size()
  BarycentricWeights weights;
  DomainMap map{MapKind::Logarithmic, 1.0};

  Vec state_at(double t) const;
  Vec control_at(double t) const;
};

/// Integral-form collocation of an infinite-horizon problem.
///
/// Decision vector layout: x(k, j) for k < nx, 1 <= j <= n at k * n + j - 1,
/// then u(k, j) for k < nu, 0 <= j <= n at nx * n + k * (n + 1) + j. The state
/// at node 0 is pinned to x0. Constraint (k, j), 1 <= j <= n, sits at
/// k * n + j - 1. Immutable; all evaluations are reentrant.
class Transcription {
 public:
  Transcription(IhocProblem problem, Discretization disc, DomainMap map,
                TranscriptionForm form = TranscriptionForm::Generic);

  const IhocProblem& problem() const { return problem_; }
  const Discretization& discretization() const { return disc_; }
  const DomainMap& map() const { return map_; }
  TranscriptionForm form() const { return form_; }

  int n() const { return disc_.n(); }
  int nx() const { return problem_.nx; }
  int nu() const { return problem_.nu; }
  int num_variables() const;
  int num_constraints() const;
  int x_index(int k, int j) const;
  int u_index(int k, int j) const;

  const Vec& tau_nodes() const { return disc_.grid->nodes; }
  Vec t_nodes() const;
  /// Per-node multiplier of the integrands, T'(tau_j) in either form.
  const Vec& node_scale() const { return scale_; }

  Mat states(const Vec& z) const;
  Mat controls(const Vec& z) const;
  /// Inverse of states/controls; column 0 of states is ignored.
  Vec pack(const Mat& states, const Mat& controls) const;
  Vec initial_guess(GuessPreset preset) const;

  double cost(const Vec& z) const;
  Vec constraints(const Vec& z) const;
  Vec cost_gradient(const Vec& z) const;
  Mat constraint_jacobian(const Vec& z) const;
  double lagrangian(const Vec& z, const Vec& r) const;
  Vec lagrangian_gradient(const Vec& z, const Vec& r) const;

  /// Nodes whose state lies outside the problem's in_domain predicate.
  int domain_violations(const Vec& z) const;

  Trajectory recover(const Vec& z, const std::vector<double>& t_eval) const;

 private:
  struct NodeDerivatives {
    std::vector<Mat> fx, fu;
    Mat gx, gu;  // nx x (n + 1), nu x (n + 1)
  };

  void check_length(const Vec& z) const;
  Mat dynamics_values(const Mat& X, const Mat& U) const;
  Vec cost_values(const Mat& X, const Mat& U) const;
  Vec apply_integral(const Mat& F) const;
  NodeDerivatives derivatives(const Mat& X, const Mat& U) const;

  IhocProblem problem_;
  Discretization disc_;
  DomainMap map_;
  TranscriptionForm form_;
  Vec scale_;
  Vec divisor_;
  double prefactor_ = 1.0;
  Mat Q_inner_;  // rows 1..n of Q
};

NlpFunctions make_nlp(std::shared_ptr<const Transcription> t);

}  // namespace ihoc
