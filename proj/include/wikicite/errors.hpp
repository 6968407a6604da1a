#pragma once

#include <stdexcept>
#include <string>

namespace wikicite {

/// Base for all pipeline errors. The CLI maps each subclass to an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad or unreadable input data: dumps, datasets, list files.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration: translation tables, flags, mismatched checkpoints.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Raised when a lookup run exceeds its endpoint failure budget.
class EndpointError : public Error {
 public:
  using Error::Error;
};

}  // namespace wikicite
