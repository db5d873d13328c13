#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace penaltylab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression, penalty spec, or problem file.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  /// Located in a multi-line file; `offset` counts within that line.
  ParseError(const std::string& what, std::size_t offset, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what + " at offset " + std::to_string(offset)),
        offset_(offset),
        line_(line) {}

  std::size_t offset() const noexcept { return offset_; }
  /// 1-based line, or 0 for single-line input.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t offset_;
  std::size_t line_ = 0;
};

enum class EvalErrorKind {
  DivisionByZero,
  EvenRootOfNegative,
  NegativeInfinity,
  NonFinite,
  NegativeResidual,
  DimensionMismatch,
};

class EvalError : public Error {
 public:
  EvalError(EvalErrorKind kind, const std::string& what) : Error(what), kind_(kind) {}

  EvalErrorKind kind() const noexcept { return kind_; }

 private:
  EvalErrorKind kind_;
};

/// A caller violated a documented precondition.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// No (near-)feasible point could be located on the searched domain.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

}  // namespace penaltylab
