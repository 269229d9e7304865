#pragma once

#include <stdexcept>
#include <string>

namespace coulomb {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SymmetryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a stored artifact no longer matches what it claims to certify.
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The corrector failed to converge; the caller is expected to shrink the step.
class StepRejected : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The solution-curve Jacobian lost rank at the current point.
class BifurcationDetected : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EigValidationFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PromotionFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace coulomb
