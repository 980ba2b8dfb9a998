#pragma once

#include <stdexcept>
#include <string>

namespace hetnet {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument or configuration value was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An iterative routine (fixed point, quadrature, series) did not reach its
/// tolerance within the iteration budget.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A linear system was singular or numerically rank deficient.
class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

}  // namespace hetnet
