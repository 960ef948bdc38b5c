#pragma once

#include <stdexcept>
#include <string>

namespace glmb {

/// Base class for all errors raised by this library.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A caller-supplied argument violates a documented precondition.
struct invalid_argument : error {
  using error::error;
};

/// A model object is structurally unusable (bad dimensions, probabilities
/// outside (0,1), non-positive-definite covariance, ...).
struct invalid_model : error {
  using error::error;
};

/// An object is in a state that does not admit the requested operation,
/// e.g. a density with no components.
struct invalid_state : error {
  using error::error;
};

/// Linear algebra broke down (singular innovation covariance, NaN weights).
struct numeric_failure : error {
  using error::error;
};

/// An exhaustive enumeration would exceed its hard size guard.
struct too_large : error {
  using error::error;
};

/// A label was requested that no component of the density contains.
struct no_such_track : error {
  using error::error;
};

/// A data file could not be parsed; carries the offending line number.
struct input_error : error {
  input_error(const std::string& what, long line) : error(what), line(line) {}
  long line;
};

/// Violation of an internal invariant; indicates a bug, not bad input.
struct internal_error : error {
  using error::error;
};

}  // namespace glmb
