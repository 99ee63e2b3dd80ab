#pragma once

#include <stdexcept>
#include <string>

namespace equiloc {

// Base class of every error raised by the library. Callers that only care
// about success/failure can catch this; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text (CSV rows, JSON documents).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Inputs are individually well formed but cannot be combined, e.g. a nodes
// file without coordinates and no distance matrix.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A value violates a documented domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A caller broke an operation's precondition (closed-facility assignment,
// mismatched outcome weighting, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// No candidate satisfies the model's side constraints.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace equiloc
