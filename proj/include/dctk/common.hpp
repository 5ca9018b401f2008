#pragma once

#include <stdexcept>
#include <string>

namespace dctk {

// Malformed or self-inconsistent input tables: dangling ids, missing
// entries, shape mismatches.  Distinct from a law *violation*, which is
// reported as a counterexample, not thrown.
struct StructuralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A stated precondition of an operation does not hold for the given values.
struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dctk
