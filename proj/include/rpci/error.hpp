#pragma once

#include <stdexcept>
#include <string>

namespace rpci {

/// Raised when inputs violate a precondition (bad flags, mismatched grids,
/// labels outside the region alphabet, empty masks where one is required).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a file cannot be read, written, or decoded.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rpci
