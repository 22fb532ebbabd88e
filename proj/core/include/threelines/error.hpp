#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace threelines {

// Input violates a documented precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Three lines that are not in generic position. test() names the check that failed.
class DegenerateInput : public InvalidInput {
 public:
  DegenerateInput(std::string test, const std::string& what)
      : InvalidInput(what), test_(std::move(test)) {}
  const std::string& test() const noexcept { return test_; }

 private:
  std::string test_;
};

// Gamma evaluated at a non-positive integer.
class GammaPole : public InvalidInput {
 public:
  explicit GammaPole(double at)
      : InvalidInput("gamma pole at " + std::to_string(at)), at_(at) {}
  double at() const noexcept { return at_; }

 private:
  double at_;
};

// Point outside the domain of an evaluator (series disk, punctures, lower half-plane).
class DomainError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

// Quadrature, ODE or root-finding did not reach its tolerance.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace threelines
