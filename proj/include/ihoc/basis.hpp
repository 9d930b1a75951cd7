#pragma once

#include <Eigen/Dense>

namespace ihoc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Gegenbauer family with index alpha > -1/2, normalized so that G_n(1) = 1.
/// alpha = 0 gives Chebyshev T_n, alpha = 1/2 gives Legendre P_n.
class GegenbauerBasis {
 public:
  explicit GegenbauerBasis(double alpha);

  double alpha() const { return alpha_; }

  /// G_n(tau) by the three-term recurrence of the normalized family.
  double eval(int n, double tau) const;

  /// G_n(tau) and G_n'(tau) together.
  void eval_with_derivative(int n, double tau, double& value,
                            double& derivative) const;

  /// G_n + G_{n+1}, whose zeros are the Gauss-Radau nodes (including -1).
  double radau_poly(int n, double tau) const;
  void radau_poly_with_derivative(int n, double tau, double& value,
                                  double& derivative) const;

  /// Squared norm of G_j under the weight (1 - tau^2)^(alpha - 1/2).
  double lambda_norm(int j) const;

  /// Leading coefficient of G_n (the constant K_n in the interpolation
  /// remainder identity G_n + G_{n+1} = K_{n+1} prod (tau - tau_k)).
  double leading_coefficient(int n) const;

 private:
  double alpha_;
};

double eval_gegenbauer(const GegenbauerBasis& basis, int n, double tau);
double lambda_norm(const GegenbauerBasis& basis, int j);

/// Gegenbauer-Gauss-Radau grid with n + 1 nodes, nodes[0] = -1.
struct RadauGrid {
  GegenbauerBasis basis{0.5};
  int n = 0;
  Vec nodes;
  Vec christoffel;
  Vec theta;

  int size() const { return n + 1; }
  double alpha() const { return basis.alpha(); }
};

/// Root-finder settings for ggr_nodes / lg_rule.
struct RootOptions {
  double step_tol = 1e-14;
  int max_iter = 100;
};

RadauGrid ggr_nodes(const GegenbauerBasis& basis, int n,
                    const RootOptions& opts = {});

/// Legendre-Gauss rule with N + 1 nodes (roots of L_{N+1}).
struct LegendreGaussRule {
  int order = 0;
  Vec nodes;
  Vec weights;
};

LegendreGaussRule lg_rule(int order, const RootOptions& opts = {});

/// Legendre polynomial L_m and its derivative.
void legendre_with_derivative(int m, double x, double& value,
                              double& derivative);

}  // namespace ihoc
