#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gasdiff {

/// Bad arguments or configuration (CLI exit code 2).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent input data (CLI exit code 3).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A simulation or solve left its stable regime (CLI exit code 4).
class InstabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure that is not an instability: singular normal equations,
/// non-finite cost, Jacobian step underflow.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ParseErrorKind {
  Io,
  MissingSection,
  UnknownColumns,
  NonNumeric,
  UnknownType,
  Truncated,
  MalformedHeader,
  CountMismatch,
  Unsupported,
};

const char* to_string(ParseErrorKind kind);

/// Structured trajectory/field parse failure; `line()` is 1-based, 0 when
/// the failure is not tied to a line.
class ParseError : public InputError {
 public:
  ParseError(ParseErrorKind kind, std::size_t line, const std::string& what);

  ParseErrorKind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }

 private:
  ParseErrorKind kind_;
  std::size_t line_;
};

}  // namespace gasdiff
