#pragma once

#include <stdexcept>
#include <string>

namespace tabula {

/// Base class for every error raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
  virtual const char* kind() const noexcept { return "error"; }
};

/// Mismatched lengths or shapes (ragged columns, bad matrix dims, ...).
class DimensionError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "dimension error"; }
};

/// Violations of the frame schema (duplicate column names, key type clash).
class SchemaError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "schema error"; }
};

/// Unknown column name or out-of-range row/column position.
class LookupError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "lookup error"; }
};

/// A value does not conform to the column type it is stored under.
class TypeError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "type error"; }
};

/// Malformed textual input. Carries a 1-based line and optional column.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg, std::size_t line = 0,
                      std::size_t column = 0)
      : Error(msg), line_(line), column_(column) {}
  const char* kind() const noexcept override { return "parse error"; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Input outside the mathematical domain of an operation
/// (mean of nothing, missing values where none are allowed, ...).
class DomainError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "domain error"; }
};

/// Invalid argument value (zero window, too many group keys, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "argument error"; }
};

/// Position outside the valid insertion range.
class RangeError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "range error"; }
};

/// An iterative numeric routine failed to converge.
class NumericError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "numeric error"; }
};

/// Network failure or non-2xx HTTP status. status() is 0 when the
/// request never produced a response.
class TransportError : public Error {
 public:
  explicit TransportError(const std::string& msg, int status = 0)
      : Error(msg), status_(status) {}
  const char* kind() const noexcept override { return "transport error"; }
  int status() const noexcept { return status_; }

 private:
  int status_;
};

/// Filesystem-level read/write failures.
class IoError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "i/o error"; }
};

}  // namespace tabula
