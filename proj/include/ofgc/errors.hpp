#pragma once

#include <stdexcept>
#include <string>

namespace ofgc {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite or structurally malformed arguments.
struct InvalidInputError : Error {
  using Error::Error;
};

// Fundamental tensor not positive definite, or a Randers one-form with
// base norm >= 1.
struct MetricDegenerateError : Error {
  using Error::Error;
};

// Derivative requested at v = 0 where G is not differentiable.
struct ZeroSectionError : Error {
  using Error::Error;
};

// p-norm jet requested too close to a coordinate hyperplane.
struct SmoothnessBoundaryError : Error {
  using Error::Error;
};

struct OutsideStripError : Error {
  using Error::Error;
};

struct ProjectionFailureError : Error {
  using Error::Error;
};

struct DegenerateBoundaryError : Error {
  using Error::Error;
};

// Zero segment inside a non-constant discrete curve.
struct DegenerateCurveError : Error {
  using Error::Error;
};

// chi_delta evaluated at or beyond its pole t = delta.
struct PenaltyBlowupError : Error {
  using Error::Error;
};

struct StuckAtBarrierError : Error {
  using Error::Error;
};

struct UnsupportedDomainError : Error {
  using Error::Error;
};

struct NoContactError : Error {
  using Error::Error;
};

struct IntegratorFailureError : Error {
  using Error::Error;
};

struct ContinuationStalledError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace ofgc
