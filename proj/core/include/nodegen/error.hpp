#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nodegen {

// Failure categories double as CLI exit codes.
enum class ErrorKind { Config = 2, Numeric = 3, Io = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }
  virtual const char* category() const noexcept { return "error"; }

 private:
  ErrorKind kind_;
};

/// Invalid parameters or inconsistent configuration.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
  const char* category() const noexcept override { return "config"; }
};

/// Argument outside the mathematical domain of an operation (r <= 0, origin, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::Numeric, what) {}
  const char* category() const noexcept override { return "domain"; }
};

/// Malformed input values (NaN coordinates and similar).
class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ErrorKind::Config, what) {}
  const char* category() const noexcept override { return "input"; }
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorKind::Numeric, what) {}
  const char* category() const noexcept override { return "numeric"; }
};

/// Two nodes share a position; the Riesz kernel is undefined.
class DegeneratePairError : public NumericError {
 public:
  DegeneratePairError(std::size_t first, std::size_t second)
      : NumericError("degenerate pair: nodes " + std::to_string(first) + " and " +
                     std::to_string(second) + " coincide"),
        first_(first),
        second_(second) {}
  std::size_t first() const noexcept { return first_; }
  std::size_t second() const noexcept { return second_; }
  const char* category() const noexcept override { return "degenerate_pair"; }

 private:
  std::size_t first_;
  std::size_t second_;
};

/// Stencil whose polynomial block is rank deficient.
class UnisolvencyError : public NumericError {
 public:
  explicit UnisolvencyError(const std::string& what) : NumericError(what) {}
  const char* category() const noexcept override { return "non_unisolvent"; }
};

class SolverError : public NumericError {
 public:
  SolverError(const std::string& what, double condition)
      : NumericError(what), condition_(condition) {}
  double condition() const noexcept { return condition_; }
  const char* category() const noexcept override { return "solver"; }

 private:
  double condition_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
  const char* category() const noexcept override { return "io"; }
};

/// Malformed file content; carries the byte offset where parsing failed.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(ErrorKind::Io, what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }
  const char* category() const noexcept override { return "parse"; }

 private:
  std::size_t offset_;
};

}  // namespace nodegen
