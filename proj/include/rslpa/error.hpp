#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rslpa {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller supplied bad input: malformed files, out-of-range parameters,
// batches that do not match the graph. The CLI maps these to exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

class ParseError : public UsageError {
 public:
  ParseError(std::size_t line, const std::string& detail, const std::string& source = "")
      : UsageError((source.empty() ? "" : source + ":") + "line " + std::to_string(line) + ": " +
                   detail),
        line_(line),
        detail_(detail) {}
  std::size_t line() const { return line_; }
  const std::string& detail() const { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

class ValidationError : public UsageError {
 public:
  using UsageError::UsageError;
};

class DomainError : public UsageError {
 public:
  using UsageError::UsageError;
};

// Engine state does not fit the graph or deltas it is paired with.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class CorruptionError : public Error {
 public:
  using Error::Error;
};

}  // namespace rslpa
