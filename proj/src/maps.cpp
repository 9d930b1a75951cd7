#include "ihoc/maps.hpp"

#include <cmath>
#include <sstream>

#include "ihoc/errors.hpp"
#include "ihoc/special.hpp"

namespace ihoc {

DomainMap::DomainMap(MapKind kind, double L) : kind_(kind), L_(L) {
  if (!(L > 0.0) || !std::isfinite(L)) {
    std::ostringstream msg;
    msg << "map scale L must be positive, got " << L;
    throw DomainError(msg.str());
  }
}

double DomainMap::forward(double tau) const {
  if (!(tau < 1.0)) throw DomainError("map_forward requires tau < 1");
  if (kind_ == MapKind::Algebraic) return L_ * (1.0 + tau) / (1.0 - tau);
  return L_ * std::log(2.0 / (1.0 - tau));
}

double DomainMap::inverse(double t) const {
  if (!(t >= 0.0)) throw DomainError("map_inverse requires t >= 0");
  if (kind_ == MapKind::Algebraic) return (t - L_) / (t + L_);
  return 1.0 - 2.0 * std::exp(-t / L_);
}

double DomainMap::derivative(int order, double tau) const {
  if (order < 1) throw DomainError("map derivative order must be >= 1");
  if (!(tau < 1.0)) throw DomainError("map_derivative requires tau < 1");
  const double gap = 1.0 - tau;
  double value = 0.0;
  if (order <= 20) {
    double fact = 1.0;
    for (int k = 2; k <= order; ++k) fact *= k;
    if (kind_ == MapKind::Algebraic) {
      value = 2.0 * L_ * fact / std::pow(gap, order + 1);
    } else {
      value = L_ * (fact / order) / std::pow(gap, order);
    }
  } else if (kind_ == MapKind::Algebraic) {
    value = std::exp(std::log(2.0 * L_) + special::log_factorial(order) -
                     (order + 1) * std::log(gap));
  } else {
    value = std::exp(std::log(L_) + special::log_factorial(order - 1) -
                     order * std::log(gap));
  }
  if (!std::isfinite(value)) {
    std::ostringstream msg;
    msg << "map derivative of order " << order << " overflows at tau=" << tau;
    throw RangeError(msg.str());
  }
  return value;
}

double map_forward(const DomainMap& m, double tau) { return m.forward(tau); }
double map_inverse(const DomainMap& m, double t) { return m.inverse(t); }
double map_derivative(const DomainMap& m, int order, double tau) {
  return m.derivative(order, tau);
}

double map_sensitivity(const DomainMap& m, double tau, double h) {
  const double d0 = m.derivative(1, tau);
  const double d1 = m.derivative(1, tau + h);
  return std::abs((d1 - d0) / d0) / std::abs(h / tau);
}

std::string to_string(MapKind kind) {
  return kind == MapKind::Algebraic ? "algebraic" : "logarithmic";
}

MapKind parse_map_kind(std::string_view name) {
  if (name == "algebraic") return MapKind::Algebraic;
  if (name == "logarithmic") return MapKind::Logarithmic;
  throw std::invalid_argument("unknown map kind: " + std::string(name));
}

}  // namespace ihoc
