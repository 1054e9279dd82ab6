#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace csbm {

// Bad input to a public operation: precondition or configuration violations.
// The CLI maps these to exit code 1.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConfigError : public InvalidArgument {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : InvalidArgument("config field '" + field + "': " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class ParseError : public InvalidArgument {
 public:
  ParseError(std::size_t line, const std::string& what)
      : InvalidArgument("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Numeric/runtime failures. The CLI maps these to exit code 2.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Every class has zero likelihood somewhere in the neighbourhood.
class DegenerateLikelihood : public NumericError {
 public:
  using NumericError::NumericError;
};

class NumericOverflow : public NumericError {
 public:
  using NumericError::NumericError;
};

// A branching-process draw exceeded its population cap.
class TruncationError : public NumericError {
 public:
  using NumericError::NumericError;
};

// A configured size limit (shell entries, enumeration size) would be exceeded.
class CapacityError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace csbm
