#pragma once

#include <stdexcept>

namespace aistk {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed textual input: bit strings, addresses, CSV rows, JSON documents.
struct ParseError : Error {
  using Error::Error;
};

// Operand shapes that do not line up: length or representation mismatch.
struct DimensionError : Error {
  using Error::Error;
};

// Out-of-range or inconsistent configuration values.
struct ParameterError : Error {
  using Error::Error;
};

// Detector used in a state its lifecycle does not allow.
struct LifecycleError : Error {
  using Error::Error;
};

// Candidate space exhausted before any detector survived censoring.
struct CoverageError : Error {
  using Error::Error;
};

// A query with no supporting data: no voters on an item, no candidates.
struct NoDataError : Error {
  using Error::Error;
};

// Filesystem and serialization failures.
struct IoError : Error {
  using Error::Error;
};

}  // namespace aistk
