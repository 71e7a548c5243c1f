#ifndef DPPMLE_ERRORS_HPP
#define DPPMLE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dppmle {

// Base class for every error thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input shape: non-square matrix, non-finite entries,
// index out of range, unknown edge.
struct StructuralError : Error {
  using Error::Error;
};

// Text that cannot be parsed (JSON, DIMACS).
struct ParseError : Error {
  using Error::Error;
};

// Well-formed input that violates a semantic constraint.
struct ValidationError : Error {
  using Error::Error;
};

// Instance exceeds a hard size guard (e.g. exhaustive enumeration bounds).
struct SizeGuardError : Error {
  using Error::Error;
};

// Argument outside the mathematical domain of a function.
struct DomainError : Error {
  using Error::Error;
};

// Instance too degenerate for the requested quantity to be defined.
struct DegenerateError : Error {
  using Error::Error;
};

// Infeasible construction parameters (e.g. odd degree sum).
struct ParameterError : Error {
  using Error::Error;
};

// Randomized construction failed its quality audit after all retries.
struct QualityError : Error {
  using Error::Error;
};

// A clause demands more literal copies than the construction provides.
struct CapacityError : Error {
  using Error::Error;
};

// Kernel has an eigenvalue at or above one and admits no L-ensemble form.
struct NotLEnsembleError : Error {
  using Error::Error;
};

// Decoder could not find any intact literal block to anchor on.
struct DecodeFailure : Error {
  using Error::Error;
};

// A library invariant that must never fail did; indicates a bug.
struct InternalError : Error {
  using Error::Error;
};

}  // namespace dppmle

#endif  // DPPMLE_ERRORS_HPP
