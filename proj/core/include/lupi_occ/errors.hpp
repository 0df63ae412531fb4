#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lupi_occ {

// Base for every error raised by the library. The CLI maps subclasses onto
// exit codes, so new error kinds should derive from one of these.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed arguments: dimension mismatch, out-of-range parameters, empty sets.
class InputError : public Error {
 public:
  using Error::Error;
};

// Malformed files: CSV cells, model files, split files.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Missing or unreadable files.
class IoError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public NumericalError {
 public:
  SingularMatrixError(std::size_t pivot_index, double pivot_magnitude)
      : NumericalError("singular matrix: pivot " + std::to_string(pivot_index) +
                       " has magnitude " + std::to_string(pivot_magnitude)),
        pivot_index_(pivot_index),
        pivot_magnitude_(pivot_magnitude) {}

  std::size_t pivot_index() const noexcept { return pivot_index_; }
  double pivot_magnitude() const noexcept { return pivot_magnitude_; }

 private:
  std::size_t pivot_index_;
  double pivot_magnitude_;
};

// Raised when a closed-form training solve fails; the message names the
// hyperparameters so grid-search pathologies can be traced.
class TrainingError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace lupi_occ
