#pragma once

#include <stdexcept>
#include <string>

namespace cpred {

/// Invalid arguments, unmet preconditions, or malformed configuration.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure: a design matrix without full column rank, or a
/// degenerate factorization. Carries enough context to name the offending
/// step when raised from inside a reduction loop.
class RankError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Filesystem and stream failures.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cpred
