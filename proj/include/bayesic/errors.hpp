#pragma once

#include <stdexcept>
#include <string>

namespace bayesic {

// Argument outside the mathematical domain of an operation (digamma at x <= 0,
// theta outside the parameter space, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed or inconsistent arguments (empty inputs, mismatched families).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Configuration that violates a modelling assumption, e.g. a Laplace
// population maximizer that falls outside the parameter box.
class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A caller broke an operation contract, e.g. DIC on a tempered posterior.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Every node of a grid kernel evaluated to -inf.
class DegenerateKernelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Closed-form posteriors only support a registered family of functionals.
class UnsupportedFunctionalError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace bayesic
