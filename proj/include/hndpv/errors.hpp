#pragma once

#include <stdexcept>
#include <string>

namespace hndpv {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input file (bad token, wrong dimensions, unknown field).
struct ParseError : Error {
  using Error::Error;
};

// Structurally sound input that violates a model invariant.
struct ValidationError : Error {
  using Error::Error;
};

// LP kernel could not certify a result within its retry budget.
struct NumericalError : Error {
  using Error::Error;
};

// Enumeration size exceeds the configured oracle budget.
struct BudgetError : Error {
  using Error::Error;
};

} // namespace hndpv
