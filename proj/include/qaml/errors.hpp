#pragma once

#include <stdexcept>
#include <string>

namespace qaml {

// Malformed input bytes: IDX streams, model files.
struct FormatError : std::runtime_error {
  explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid experiment configuration (missing files, bad field values).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Failure while evaluating a model or a GA fitness function.
struct EvalError : std::runtime_error {
  explicit EvalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace qaml
