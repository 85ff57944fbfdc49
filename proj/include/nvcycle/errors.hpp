// errors.hpp - exception types shared by all modules

#pragma once

#include <stdexcept>
#include <string>

namespace nvcycle {

// Invalid parameter values (negative rates, out-of-range fractions, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operation applied in a state it is not defined for (MW pulse while the
// centre is optically excited, ps pulse with excited remnants, ...).
class SequencingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values or loss of numerical meaning.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Generator kernel is not one-dimensional (e.g. zero pump splits the chain).
class DegenerateSteadyStateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Rate inversion found no root in the physical region. Carries the best
// residual reached so the caller can judge how inconsistent the inputs are.
class ExtractionError : public std::runtime_error {
 public:
  ExtractionError(const std::string& what, double best_residual)
      : std::runtime_error(what), best_residual_(best_residual) {}
  double best_residual() const { return best_residual_; }

 private:
  double best_residual_;
};

}  // namespace nvcycle
