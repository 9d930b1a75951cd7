#pragma once

#include "ihoc/barycentric.hpp"
#include "ihoc/basis.hpp"

namespace ihoc {

/// Barycentric GGR integration matrix. Row j maps nodal values to the
/// integral over [-1, tau_j]; cost_row integrates over [-1, 1].
struct IntegrationMatrix {
  std::shared_ptr<const RadauGrid> grid;
  Mat Q;
  Vec cost_row;
  LegendreGaussRule lg;
};

/// Barycentric GGR differentiation matrix.
struct DifferentiationMatrix {
  std::shared_ptr<const RadauGrid> grid;
  Mat D;
};

/// Inner Legendre-Gauss order used for an (n + 1)-node grid:
/// N = ceil((n + 1) / 2), i.e. N + 1 Gauss points.
int grim_inner_order(int n);

IntegrationMatrix build_grim(const BarycentricWeights& weights);
Vec apply_grim(const IntegrationMatrix& m, const Vec& values);

DifferentiationMatrix build_grdm(const BarycentricWeights& weights);

}  // namespace ihoc
