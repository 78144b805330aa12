#pragma once

#include <stdexcept>
#include <string>

namespace orbit {

/// Base class of all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad inputs or violated invariants (CLI exit code 2).
struct ValidationError : Error {
  using Error::Error;
};

/// A numerical procedure failed to converge or broke down (CLI exit code 3).
struct NumericalError : Error {
  using Error::Error;
};

/// File or serialization problems (CLI exit code 1).
struct IoError : Error {
  using Error::Error;
};

struct DimensionMismatchError : ValidationError {
  using ValidationError::ValidationError;
};
struct AlgebraMismatchError : ValidationError {
  using ValidationError::ValidationError;
};
struct InvariantError : ValidationError {
  using ValidationError::ValidationError;
};
struct InvalidParameterError : ValidationError {
  using ValidationError::ValidationError;
};
struct ZeroElementError : ValidationError {
  using ValidationError::ValidationError;
};
struct NotNilpotentError : ValidationError {
  using ValidationError::ValidationError;
};
struct NotCriticalError : ValidationError {
  using ValidationError::ValidationError;
};
struct NotInPError : ValidationError {
  using ValidationError::ValidationError;
};
struct ZeroXiError : ValidationError {
  using ValidationError::ValidationError;
};
struct NonIntegerWeightsError : ValidationError {
  using ValidationError::ValidationError;
};
struct BadFreeDatumError : ValidationError {
  using ValidationError::ValidationError;
};

struct NoSolutionError : NumericalError {
  using NumericalError::NumericalError;
};
struct MaxIterationsError : NumericalError {
  using NumericalError::NumericalError;
};
struct LeftOrbitError : NumericalError {
  using NumericalError::NumericalError;
};
struct BlowUpError : NumericalError {
  using NumericalError::NumericalError;
};
struct NotConvergedError : NumericalError {
  using NumericalError::NumericalError;
};
struct SingularSolveError : NumericalError {
  using NumericalError::NumericalError;
};
struct OutOfRadiusError : NumericalError {
  using NumericalError::NumericalError;
};
struct NewtonDivergedError : NumericalError {
  using NumericalError::NumericalError;
};

} // namespace orbit
