#pragma once

#include <stdexcept>
#include <string>

namespace drlqg {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shape mismatch between problem matrices (message names the offending
// matrix and time index).
struct DimensionError : Error {
  using Error::Error;
};

// A matrix that must be PSD/PD fails the eigenvalue test.
struct DefinitenessError : Error {
  DefinitenessError(const std::string& msg, double min_eigenvalue)
      : Error(msg), min_eigenvalue(min_eigenvalue) {}
  double min_eigenvalue;
};

// A policy matrix violates the lower-block-triangular (causality) pattern.
struct CausalityError : Error {
  CausalityError(const std::string& msg, int block_row, int block_col)
      : Error(msg), block_row(block_row), block_col(block_col) {}
  int block_row;
  int block_col;
};

// A linear system that must be solved exactly is numerically singular.
struct SingularSystemError : Error {
  SingularSystemError(const std::string& msg, double smallest_singular_value)
      : Error(msg), smallest_singular_value(smallest_singular_value) {}
  double smallest_singular_value;
};

// An iterative solver exhausted its budget; carries the final residual.
struct ConvergenceError : Error {
  ConvergenceError(const std::string& msg, double residual)
      : Error(msg), residual(residual) {}
  double residual;
};

// Malformed configuration / serialization input (message names the field).
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace drlqg
