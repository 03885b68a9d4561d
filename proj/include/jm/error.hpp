#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jm {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input; `line()` is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A log (or an operation's result) contains no traces.
class EmptyLogError : public Error {
 public:
  using Error::Error;
};

/// A learning engine or model operation could not produce a result.
class EngineError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace jm
