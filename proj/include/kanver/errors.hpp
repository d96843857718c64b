#pragma once

#include <stdexcept>
#include <string>

namespace kanver {

/// Input to an operation violates its preconditions (bad dimensions, k = 0, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Query outside the open domain (-L, L) of a unit.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Model document rejected; `path()` is a JSON pointer to the offending node.
class ModelError : public std::runtime_error {
 public:
  ModelError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Text input (LP file, solution file) could not be parsed.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// No allocation meets the requested error budget.
class InfeasibleBudget : public std::runtime_error {
 public:
  InfeasibleBudget(const std::string& what, double minimum_achievable)
      : std::runtime_error(what), minimum_achievable_(minimum_achievable) {}
  double minimum_achievable() const noexcept { return minimum_achievable_; }

 private:
  double minimum_achievable_;
};

class EncodingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by the built-in solver: unbounded relaxation, binary cap exceeded, ...
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kanver
