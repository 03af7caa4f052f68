#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cvxreg {

enum class ErrorKind {
  invalid_argument,
  dimension_mismatch,
  domain,
  invalid_grid,
  unsupported_transform,
  nonfinite_loss,
  singular_system,
  dimension_too_large,
  parse,
  missing_target_column,
  non_numeric_cell,
  io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by the normal-equation solve; `pivot()` is the zero-based index of
/// the first pivot that fell below the relative threshold.
class SingularSystemError : public Error {
 public:
  SingularSystemError(std::size_t pivot, const std::string& what)
      : Error(ErrorKind::singular_system, what), pivot_(pivot) {}

  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

/// CSV failures carry 1-based line and column coordinates (0 when unknown).
class CsvError : public Error {
 public:
  CsvError(ErrorKind kind, std::size_t line, std::size_t column,
           const std::string& what)
      : Error(kind, what), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace cvxreg
