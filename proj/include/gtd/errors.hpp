#pragma once

#include <stdexcept>
#include <string>

namespace gtd {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape or dimension mismatch between operands.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Matricization of an odd-order tensor. Kept distinct from ShapeError so
// callers can tell "wrong operand" from "operation undefined for this order".
class OddOrderError : public ShapeError {
 public:
  using ShapeError::ShapeError;
};

// Allocation would exceed the configured element-count guard.
class SizeGuardError : public Error {
 public:
  using Error::Error;
};

// A dense solve failed its residual check.
class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

// A seeded randomized search exhausted its retry budget.
class RetryError : public Error {
 public:
  using Error::Error;
};

// Malformed CLI flags or JSON configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace gtd
