#pragma once

#include <stdexcept>
#include <string>

namespace exactpot {

/// Malformed input: dimension or length mismatches, parse failures,
/// operators that fail row-degree validation.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The input is well formed but violates a precondition of the requested
/// computation (e.g. a multiplier plan for a symbol without constant rank).
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A rank drop was witnessed where constant rank is required.
class RankDropError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

}  // namespace exactpot
