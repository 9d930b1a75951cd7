#pragma once

#include <string>
#include <string_view>

namespace ihoc {

enum class MapKind {
  Algebraic,    // t = L (1 + tau) / (1 - tau)
  Logarithmic,  // t = L ln(2 / (1 - tau))
};

/// Parametric map from tau in [-1, 1) onto t in [0, inf).
class DomainMap {
 public:
  DomainMap(MapKind kind, double L);

  MapKind kind() const { return kind_; }
  double scale() const { return L_; }

  double forward(double tau) const;
  double inverse(double t) const;
  /// order-th derivative dT^m/dtau^m, order >= 1.
  double derivative(int order, double tau) const;

 private:
  MapKind kind_;
  double L_;
};

double map_forward(const DomainMap& m, double tau);
double map_inverse(const DomainMap& m, double t);
double map_derivative(const DomainMap& m, int order, double tau);

/// Relative change of T' under a perturbation h of tau, divided by the
/// relative change of tau: |dT'/T'| / |h/tau|.
double map_sensitivity(const DomainMap& m, double tau, double h);

std::string to_string(MapKind kind);
MapKind parse_map_kind(std::string_view name);

}  // namespace ihoc
