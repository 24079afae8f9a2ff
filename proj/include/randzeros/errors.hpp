#pragma once

#include <stdexcept>
#include <string>

namespace rz {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Iterative method ran out of budget before meeting its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A quantity that must be positive/finite was not (e.g. v·Cv underflowed).
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Floating point hit a measure-zero configuration (multiple roots, collapsed chain).
class DegeneracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The requested family/operation combination has no implementation.
class UnsupportedError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace rz
