#pragma once

#include <stdexcept>
#include <string>

namespace loudsn {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parameters outside the admissible box, malformed grids, bad config.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Evaluation outside the domain of a formula (nonpositive radicand, g <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Evaluation on a polar locus or at a chart singularity (z = 0, v = 0, x U = 0).
class SingularityError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Newton, quadrature or extrapolation that failed to meet its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace loudsn
