#pragma once

#include <stdexcept>
#include <string>

namespace lcc {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration (bad field, unreachable omegaLC, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a formula.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The requested working point does not exist or is dynamically unstable.
class InstabilityError : public Error {
 public:
  using Error::Error;
};

/// No stable equilibrium: the DC bias is at or beyond pull-in.
class PullInError : public InstabilityError {
 public:
  using InstabilityError::InstabilityError;
};

/// A numerical routine failed to reach its tolerance.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace lcc
