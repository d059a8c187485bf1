#pragma once

#include <stdexcept>
#include <string>

namespace rwsm {

/// Input outside the mathematical domain of an operation (antipodal log,
/// infeasible base point, unsupported manifold kind).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Shapes or manifolds that do not match.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed graph text.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Exhaustive enumeration refused because it would exceed the budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure could not produce a finite or feasible result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rwsm
