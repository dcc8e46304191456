#pragma once

#include <stdexcept>
#include <string>

namespace ncstable {

/// Malformed or inconsistent input (dimension mismatch, bad parameters).
struct InputError : std::invalid_argument {
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// Evaluation hit a singular point (e.g. pencil not invertible at X).
struct EvalError : std::runtime_error {
  explicit EvalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ncstable
