#pragma once

#include <stdexcept>
#include <string>

namespace essaymrc {

/// Base for all recoverable engine errors; the CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file (JSON, record grammar, rule set, checkpoint).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input that violates a data invariant (e.g. a gold answer that
/// does not match the context at its claimed offset).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration values or incompatible artifacts.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace essaymrc
