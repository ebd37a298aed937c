#pragma once

#include <stdexcept>
#include <string>

namespace maxent {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Precondition or argument-domain violation.
struct ArgumentError : Error {
  using Error::Error;
};

// normalize() on a table with no mass.
struct ZeroMassError : Error {
  using Error::Error;
};

// A referenced variable label is not part of the table.
struct UnknownVariableError : Error {
  using Error::Error;
};

// Conditioning event has zero probability.
struct ConditioningOnNullEventError : Error {
  using Error::Error;
};

// Variable sets or table dimensions do not match the expected layout.
struct ShapeError : Error {
  using Error::Error;
};

// GMEP pair list does not cover every {t, t'} exactly once.
struct PairCoverageError : Error {
  using Error::Error;
};

// Constraint targets disagree on shared marginals.
struct ConsistencyError : Error {
  using Error::Error;
};

// File or JSON schema problems.
struct IoError : Error {
  using Error::Error;
};

}  // namespace maxent
