#pragma once

#include <stdexcept>
#include <string>

namespace liegram {

// Malformed or dimensionally inconsistent input. Maps to CLI exit code 2.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A factorization or positivity check failed during computation. Maps to
// CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Logarithm requested on the branch cut (rotation angle at pi).
class SingularityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace liegram
