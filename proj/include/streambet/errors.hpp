#pragma once

#include <stdexcept>
#include <string>

namespace streambet {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite or malformed numeric input.
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

// Operation evaluated outside its mathematical domain (e.g. 1 - g*theta <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Outcome bound d must be positive.
class InvalidBoundError : public Error {
 public:
  using Error::Error;
};

// A data-driven bound estimate collapsed to zero.
class DegenerateBoundError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration (rejected before any data is touched where possible).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// File I/O or parse failure; message names the path and line where known.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace streambet
