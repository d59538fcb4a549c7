#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aprox {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point lies outside the (open) domain of a conjugate reference or of a
/// gradient map. Carries the offending coordinate.
class DomainError : public Error {
 public:
  DomainError(const std::string& what, std::size_t index)
      : Error(what + " (coordinate " + std::to_string(index) + ")"), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Constraint-qualification or configuration violation, e.g. 0 not in the
/// interior of dom phi* for g = 0 under the exponential reference.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An inner numerical procedure failed (bracketing, nonconvergence).
class NumericError : public Error {
 public:
  NumericError(const std::string& what, std::size_t index)
      : Error(what + " (coordinate " + std::to_string(index) + ")"), index_(index) {}
  explicit NumericError(const std::string& what) : Error(what), index_(static_cast<std::size_t>(-1)) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Stationarity of a separable backward step could not be bracketed; the step
/// size is presumably at or above the prox-boundedness threshold.
class ProxBoundednessError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Backtracking reached the lambda_min safeguard without satisfying the
/// descent test.
class LinesearchFailure : public Error {
 public:
  using Error::Error;
};

/// A smoothness-constant combination rule was applied outside its hypotheses.
class CalculusError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace aprox
