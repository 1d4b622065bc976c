#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fracopt {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset` is the 0-based byte position of the
/// offending token.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, std::size_t offset)
      : Error(message + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// An identifier in an expression is not among the declared variables.
class UnknownVariableError : public Error {
 public:
  UnknownVariableError(const std::string& name, std::size_t offset)
      : Error("unknown variable '" + name + "' (at offset " + std::to_string(offset) + ")"),
        name_(name),
        offset_(offset) {}

  const std::string& name() const { return name_; }
  std::size_t offset() const { return offset_; }

 private:
  std::string name_;
  std::size_t offset_;
};

/// log/sqrt of a negative argument, division by exact zero, or a non-finite
/// intermediate. Never surfaces as a silent NaN.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An integral or test-function evaluation failed (wraps a DomainError with
/// context about where it happened).
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// The integral of B, or B itself, contradicts the declared sign or is too
/// close to zero to divide by.
class DenominatorSignViolation : public Error {
 public:
  using Error::Error;
};

/// The sampled sign check found a point where B contradicts its declared
/// sign; the solver refuses to run.
class SignViolation : public Error {
 public:
  using Error::Error;
};

class OutOfDomainError : public Error {
 public:
  using Error::Error;
};

class UnboundedSpaceError : public Error {
 public:
  using Error::Error;
};

/// More than half of the grid evaluations failed.
class IllPosedProblem : public Error {
 public:
  using Error::Error;
};

/// The requested artifact does not exist for this classification.
class NotApplicableError : public Error {
 public:
  using Error::Error;
};

class TooLargeError : public Error {
 public:
  using Error::Error;
};

class UnknownEntryError : public Error {
 public:
  using Error::Error;
};

class InvalidCostsError : public Error {
 public:
  using Error::Error;
};

/// Problem-file schema violation.
class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace fracopt
