#pragma once

#include <stdexcept>
#include <string>

namespace holoscope {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed user input: map files, parameters, measure files.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Base for failures that come from the mathematics rather than the input format.
class NumericError : public Error {
 public:
  using Error::Error;
};

// A numeric hypothesis of an operation does not hold (point not repelling,
// start point inside K_f, map not expanding, ...).
class PreconditionError : public NumericError {
 public:
  using NumericError::NumericError;
};

// An iterative method did not deliver, or intermediate values overflowed.
class ConvergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace holoscope
