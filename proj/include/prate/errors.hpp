#ifndef PRATE_ERRORS_HPP
#define PRATE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace prate {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract input (bad distribution, bad codeword, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A parameter lies outside the domain of the requested quantity.
class DomainError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// A computation would exceed a configured feasibility cap.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

/// An internal consistency check failed.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace prate

#endif  // PRATE_ERRORS_HPP
