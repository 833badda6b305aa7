#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sobv {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. Line and column are 1-based.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& msg, std::size_t line, std::size_t column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Application with the wrong number of arguments.
class ArityError : public Error {
 public:
  using Error::Error;
};

/// Symbol or variable that is neither bound nor supplied.
class UnboundSymbolError : public Error {
 public:
  using Error::Error;
};

/// Ill-sorted bit-vector term or formula.
class SortError : public Error {
 public:
  using Error::Error;
};

/// A configured cap (width, arity, bit budget) would be exceeded.
class ResourceExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace sobv
