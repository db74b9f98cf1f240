#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qmcts {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Structurally invalid instance (bad variable index, self-loop, ...).
class InvalidInstance : public Error {
 public:
  using Error::Error;
};

/// A request exceeds a configured size cap (qubits, leaves).
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

/// Rejection sampling gave up.
class GenerationFailure : public Error {
 public:
  GenerationFailure(const std::string& what, std::size_t attempts)
      : Error(what + " (gave up after " + std::to_string(attempts) +
              " attempts)"),
        attempts_(attempts) {}

  std::size_t attempts() const noexcept { return attempts_; }

 private:
  std::size_t attempts_;
};

/// Malformed DIMACS / edge-list input. Line numbers are 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A caller broke an operation's precondition.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Inconsistent or out-of-range configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The local minimizer met a non-finite cost.
class MinimizerFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace qmcts
