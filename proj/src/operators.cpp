#include "ihoc/operators.hpp"

#include "ihoc/errors.hpp"

namespace ihoc {

int grim_inner_order(int n) { return (n + 2) / 2; }

IntegrationMatrix build_grim(const BarycentricWeights& weights) {
  const RadauGrid& g = *weights.grid;
  const int m = g.size();
  IntegrationMatrix out;
  out.grid = weights.grid;
  out.lg = lg_rule(grim_inner_order(g.n));
  out.Q = Mat::Zero(m, m);
  out.cost_row = Vec::Zero(m);

  const Vec& t = out.lg.nodes;
  const Vec& wq = out.lg.weights;
  for (int j = 1; j < m; ++j) {
    const double tj = g.nodes[j];
    const double half = 0.5 * (tj + 1.0);
    for (int k = 0; k < t.size(); ++k) {
      const double tau = 0.5 * ((tj + 1.0) * t[k] + tj - 1.0);
      out.Q.row(j) += (half * wq[k]) * lagrange_basis(weights, tau).transpose();
    }
  }
  for (int k = 0; k < t.size(); ++k) {
    out.cost_row += wq[k] * lagrange_basis(weights, t[k]);
  }
  return out;
}

Vec apply_grim(const IntegrationMatrix& m, const Vec& values) {
  if (values.size() != m.Q.cols()) {
    throw DimensionError("apply_grim: value vector length mismatch");
  }
  return m.Q * values;
}

DifferentiationMatrix build_grdm(const BarycentricWeights& weights) {
  const Vec& x = weights.nodes();
  const Vec& xi = weights.xi;
  const int m = static_cast<int>(x.size());
  DifferentiationMatrix out;
  out.grid = weights.grid;
  out.D = Mat::Zero(m, m);
  for (int j = 0; j < m; ++j) {
    double row_sum = 0.0;
    for (int i = 0; i < m; ++i) {
      if (i == j) continue;
      const double d = (xi[i] / xi[j]) / (x[j] - x[i]);
      out.D(j, i) = d;
      row_sum += d;
    }
    out.D(j, j) = -row_sum;
  }
  return out;
}

}  // namespace ihoc
