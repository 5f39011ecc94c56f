#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace ampd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector/matrix sizes that do not agree with the problem.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A required input condition does not hold (bad step, bad range, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// NaN or Inf produced or received. `what()` names the offending quantity.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// An iterative routine hit its cap before reaching tolerance.
/// Carries the best iterate found so far.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& msg, Eigen::VectorXd best)
      : Error(msg), best_(std::move(best)) {}

  const Eigen::VectorXd& best() const noexcept { return best_; }

 private:
  Eigen::VectorXd best_;
};

namespace detail {

inline void require_dim(Eigen::Index got, Eigen::Index want, const char* what) {
  if (got != want) {
    throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(want) +
                         ", got " + std::to_string(got));
  }
}

template <class Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (!m.allFinite()) throw NumericalError(std::string("nonfinite value in ") + what);
}

inline void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw NumericalError(std::string("nonfinite value in ") + what);
}

}  // namespace detail
}  // namespace ampd
