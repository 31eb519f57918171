#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace litgraph {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or incomplete user configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Structurally invalid input data (taxonomy, alias tables, corpus).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A mathematical operation was called outside its domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A caller violated an operation precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A label or identifier that does not exist.
class LookupError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Failure talking to a remote source. `retriable` is false for
/// definitive answers such as HTTP 404.
class FetchError : public Error {
 public:
  FetchError(const std::string& what, int status, bool retriable)
      : Error(what), status_(status), retriable_(retriable) {}
  int status() const noexcept { return status_; }
  bool retriable() const noexcept { return retriable_; }

 private:
  int status_;
  bool retriable_;
};

}  // namespace litgraph
