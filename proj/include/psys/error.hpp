#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace psys {

/// Base of every exception raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset` is the byte position of the problem.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : Error(message + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class UnknownIdentifierError : public ParseError {
 public:
  UnknownIdentifierError(const std::string& name, std::size_t offset)
      : ParseError("unknown identifier '" + name + "'", offset), name_(name) {}
  const std::string& identifier() const noexcept { return name_; }

 private:
  std::string name_;
};

class EvaluationError : public Error {
 public:
  enum class Kind { unbound_variable, domain };
  EvaluationError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

class GridError : public Error {
 public:
  using Error::Error;
};

class ExponentError : public Error {
 public:
  enum class Kind { p_range, dual_condition, r_range, singular };
  ExponentError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// An inner nonlinear solve did not reach its tolerance.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation was not met by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class CsvError : public Error {
 public:
  using Error::Error;
};

}  // namespace psys
