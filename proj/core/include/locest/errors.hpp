#pragma once

#include <stdexcept>
#include <string>

namespace locest {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid parameters while constructing or validating a distribution.
class InvalidDistribution : public Error {
 public:
  using Error::Error;
};

/// Fixture parameters outside their admissible range.
class InvalidFixture : public Error {
 public:
  using Error::Error;
};

/// Smoothing radius must be strictly positive.
class InvalidRadius : public Error {
 public:
  using Error::Error;
};

/// Probability argument outside (0, 1).
class InvalidProbability : public Error {
 public:
  using Error::Error;
};

/// Density query at the exact location of a point mass.
class AtomDensityUndefined : public Error {
 public:
  using Error::Error;
};

/// Score-moment offset beyond the admissible half-radius.
class OffsetTooLarge : public Error {
 public:
  using Error::Error;
};

/// Numerical integration failed to converge.
class QuadratureFailure : public Error {
 public:
  using Error::Error;
};

/// Too few samples for the requested confidence level.
class SampleSizeTooSmall : public Error {
 public:
  using Error::Error;
};

/// No smoothing radius on the search grid satisfies all feasibility conditions.
class NoFeasibleSmoothing : public Error {
 public:
  using Error::Error;
};

/// Divergence conditions are degenerate at zero shift.
class ShiftZero : public Error {
 public:
  using Error::Error;
};

/// Generic argument validation failure.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace locest
