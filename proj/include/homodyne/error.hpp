#pragma once

#include <stdexcept>
#include <string>

namespace homodyne {

/// Invalid configuration: Fock index above the hard cap, bad counts, etc.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An argument outside the mathematical domain of an operation (e.g. eta not in (0,1]).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A Fock expansion was requested at a truncation too small to hold the state.
class TruncationError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Likelihood evaluation hit a non-positive mixture density.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Estimation could not proceed, e.g. every event was excluded.
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unreadable dataset / table file.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace homodyne
