#pragma once

#include <stdexcept>
#include <string>

namespace germforge {

/// Misuse of the algebra layer: dimension or truncation mismatch, bad degrees.
struct StructuralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Inversion requested for a jet or t-series that vanishes at the origin.
struct NotAUnitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A condition that is guaranteed by earlier checks failed anyway.
/// Indicates a truncation-budget bug in the engine, not bad user input.
struct InternalConsistencyError : std::logic_error {
  using std::logic_error::logic_error;
};

/// Caller violated a documented precondition of an operation.
struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace germforge
