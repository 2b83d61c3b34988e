#ifndef CFID_ERRORS_HPP
#define CFID_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cfid {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raw table has wrong rank, ragged rows, or a dimension < 2.
struct BadShapeError : Error {
    using Error::Error;
};

/// A probability cell lies below the strict positivity floor.
struct NonPositiveCellError : Error {
    using Error::Error;
};

/// Entries of a distribution do not sum to 1 within tolerance.
struct NotNormalizedError : Error {
    using Error::Error;
};

/// An observed summary violates its simplex invariants.
struct InvalidSummaryError : Error {
    using Error::Error;
};

/// The constrained sampler cannot jointly realize a constraint set.
/// Reported, never silently relaxed.
struct UnsatisfiableConstraintSetError : Error {
    using Error::Error;
};

/// A witness base admits no pair reaching the minimum effect gap.
struct DegenerateBaseError : Error {
    using Error::Error;
};

/// A condition string does not parse against the condition grammar.
struct UnknownConditionError : Error {
    using Error::Error;
};

/// Input file failed to parse or validate; `path` is a JSON-pointer-style
/// location of the offending field.
struct ParseError : Error {
    std::string path;
    ParseError(std::string where, const std::string& what)
        : Error(where + ": " + what), path(std::move(where)) {}
};

}  // namespace cfid

#endif
