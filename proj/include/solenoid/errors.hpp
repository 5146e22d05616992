#pragma once

#include <stdexcept>
#include <string>

namespace solenoid {

/// Violated precondition or invalid value (bad depth, mismatched specs,
/// non-positive field, ...).  CLI maps this to exit code 3.
class DomainError : public std::runtime_error {
public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input file or string.  CLI maps this to exit code 2.
class ParseError : public std::runtime_error {
public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// A requested tolerance could not be met (reciprocal reconstruction,
/// conjugacy residual).  CLI maps this to exit code 4.
class ToleranceError : public std::runtime_error {
public:
  explicit ToleranceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace solenoid
