#pragma once

#include <stdexcept>
#include <string>

namespace spinnet {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed networks, schedules, file input. CLI maps these to exit code 2.
struct InvalidInputError : Error {
  using Error::Error;
};

struct NotBipartiteError : InvalidInputError {
  using InvalidInputError::InvalidInputError;
};

struct UnknownEdgeError : InvalidInputError {
  using InvalidInputError::InvalidInputError;
};

struct EmptySectorError : InvalidInputError {
  using InvalidInputError::InvalidInputError;
};

struct OverlappingEdgeError : InvalidInputError {
  using InvalidInputError::InvalidInputError;
};

struct OddLengthChainError : InvalidInputError {
  using InvalidInputError::InvalidInputError;
};

struct DimensionMismatchError : InvalidInputError {
  using InvalidInputError::InvalidInputError;
};

struct UnequalSpinsError : InvalidInputError {
  using InvalidInputError::InvalidInputError;
};

struct OverflowError : Error {
  using Error::Error;
};

struct ConvergenceError : Error {
  ConvergenceError(const std::string& msg, int iterations_run, double best_residual)
      : Error(msg), iterations(iterations_run), residual(best_residual) {}
  int iterations;
  double residual;
};

// Ground state of the requested V_{s,m} is not unique; carries the offending
// near-zero gap so callers can report how closed it is.
struct DegenerateGroundError : Error {
  DegenerateGroundError(const std::string& msg, double gap_found) : Error(msg), gap(gap_found) {}
  double gap;
};

// An eigenvector's <S^2> sits too far from every admissible s(s+1).
struct AmbiguousLabelError : Error {
  AmbiguousLabelError(const std::string& msg, double residual_found)
      : Error(msg), residual(residual_found) {}
  double residual;
};

}  // namespace spinnet
