#pragma once

#include <stdexcept>
#include <string>

namespace protkin {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed caller input: wrong shapes, unknown residue codes, empty sets.
class InputError : public Error {
 public:
  using Error::Error;
};

// A value outside the mathematical domain of an operation (negative bond
// length, non-rigid matrix, non-unit quaternion, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Gradient requested at a point where the function is not differentiable.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// A value that cannot be represented in an output format.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Non-finite value produced while evaluating a user function.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

// Text that does not follow a file format. Line and column are 1-based; 0
// means unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column = 0)
      : Error(format(what, line, column)), line_(line), column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& what, int line, int column) {
    if (line <= 0) return what;
    std::string where = "line " + std::to_string(line);
    if (column > 0) where += ", column " + std::to_string(column);
    return where + ": " + what;
  }

  int line_;
  int column_;
};

}  // namespace protkin
