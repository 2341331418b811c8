#pragma once

#include <stdexcept>
#include <string>

namespace btit {

// Caller violated a documented precondition (bad dimension, negative time, ...).
class PreconditionError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

// Non-finite input or overflow in a numeric kernel.
class NumericDomainError : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

// The weighted controllability Gramian is singular or too ill-conditioned to
// invert at the requested arrival time.
class SingularGramianError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// No arrival time in the search interval gives an invertible Gramian.
class UnsteerablePairError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Rejection sampling could not find a valid state.
class InfeasibleSpaceError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Scenario document failed to parse or violates an invariant.
class ScenarioError : public std::runtime_error
{
public:
  ScenarioError(std::string field, const std::string& what)
    : std::runtime_error(field + ": " + what), field_(std::move(field))
  {
  }

  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

}  // namespace btit
