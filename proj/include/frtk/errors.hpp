#pragma once

#include <stdexcept>
#include <string>

namespace frtk {

// Base of the library's error taxonomy. The C API maps each class to a
// status code; the CLI maps them to exit codes.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Structurally invalid input: size mismatches, bad ranges, broken JSON shapes.
struct InvalidArgument : Error {
  using Error::Error;
};

// Ill-formed optimization task (inconsistent dimensions, empty pieces).
struct MalformedTask : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};

struct DimensionMismatch : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};

// NaN or infinity where a finite float is required.
struct NonFinite : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};

// A certificate (exposing vector, FR step) fails its own invariants.
struct InvalidCertificate : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};

// Matrix order below the minimum a construction is defined for.
struct BadOrder : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};

// Text input rejected; carries a position when known.
struct ParseError : Error {
  ParseError(const std::string& msg, int line = 0, int column = 0)
      : Error(line > 0 ? msg + " (line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ")"
                       : msg),
        line(line),
        column(column) {}
  int line;
  int column;
};

// A clause is not three literals over three distinct variables.
struct NonTernaryClause : ParseError {
  using ParseError::ParseError;
};

// An operation's stated precondition does not hold; message names it.
struct PreconditionFailed : Error {
  using Error::Error;
};

// Variable removal asked for a coordinate that is not certified redundant.
struct NotRedundant : PreconditionFailed {
  using PreconditionFailed::PreconditionFailed;
};

// Clause-side pipeline invoked before preprocessing.
struct NotPreprocessed : PreconditionFailed {
  using PreconditionFailed::PreconditionFailed;
};

// A witness sequence was requested for an assignment that falsifies a clause.
struct UnsatisfiedAssignment : PreconditionFailed {
  UnsatisfiedAssignment(const std::string& msg, int clause)
      : PreconditionFailed(msg), clause(clause) {}
  int clause;
};

// Feasible region of the nonnegative slice is empty.
struct EmptyFeasibleSet : Error {
  using Error::Error;
};

// Exhaustive search refused: instance above the hard cap.
struct TooLarge : Error {
  using Error::Error;
};

// Work estimate exceeds the caller-supplied budget.
struct BudgetExceeded : Error {
  using Error::Error;
};

// An internal invariant failed; indicates a bug, not bad input.
struct InternalError : Error {
  using Error::Error;
};

// A mathematical guarantee the toolkit promises to uphold was observed to
// fail (certified values disagree). Distinct from InternalError so callers
// can surface "claims violated" as its own outcome.
struct ClaimViolated : Error {
  using Error::Error;
};

}  // namespace frtk
