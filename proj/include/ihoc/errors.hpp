#pragma once

#include <stdexcept>
#include <string>

namespace ihoc {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative procedure failed to meet its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A result overflowed or became non-finite.
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

/// Vector/matrix sizes that do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace ihoc
