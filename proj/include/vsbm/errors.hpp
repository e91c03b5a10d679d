#pragma once

#include <stdexcept>
#include <string>

namespace vsbm {

/// Bad input: shape mismatch, parameter out of range, missing latent fields.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input is valid but exceeds what an exhaustive routine will attempt.
class UnsupportedSizeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A numerical guard tripped: near-singular factor, ill-conditioned inverse,
/// covariance outside the PSD cone.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vsbm
