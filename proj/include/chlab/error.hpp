#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chlab {

/// Base class for all failures raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the arguments was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The quadrature builder ran out of node budget before reaching its target.
class QuadratureBudgetExceeded : public Error {
 public:
  QuadratureBudgetExceeded(const std::string& what, double achieved)
      : Error(what), achieved_accuracy(achieved) {}
  double achieved_accuracy;
};

/// A function value at a quadrature node was not finite.
class NonFiniteValue : public Error {
 public:
  NonFiniteValue(const std::string& what, std::size_t node)
      : Error(what), node_index(node) {}
  std::size_t node_index;
};

/// Discrete orthonormality was lost during basis construction.
class OrthogonalityLoss : public Error {
 public:
  OrthogonalityLoss(const std::string& what, double defect_, int degree_)
      : Error(what), defect(defect_), degree(degree_) {}
  double defect;
  int degree;
};

/// An iterative solver did not reach its tolerance.
class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(const std::string& what, double best, double last_change)
      : Error(what), best_value(best), last_relative_change(last_change) {}
  double best_value;
  double last_relative_change;
};

/// The charge-simulation fit did not reach the requested residual.
class GreenFitFailure : public Error {
 public:
  GreenFitFailure(const std::string& what, double residual_)
      : Error(what), residual(residual_) {}
  double residual;
};

}  // namespace chlab
