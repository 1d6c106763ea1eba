#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace funcert {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed regex or problem-file text. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A structural invariant of a clause or rule application was broken.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// A configured resource cap (language store size, steps, visited set) was hit.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

}  // namespace funcert
