#pragma once

#include <stdexcept>
#include <string>

namespace newsxlt {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parse failure in one of the on-disk formats. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Embedding tables do not cover the news ids that a behaviors log references.
class CoverageError : public Error {
 public:
  using Error::Error;
};

}  // namespace newsxlt
