#pragma once

#include <stdexcept>
#include <string>

namespace spacelike {

/// Bad arguments or inconsistent sizes from the caller. CLI exit code 2.
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation
/// (e.g. a vector that should be unit timelike but is not).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Numerical breakdown: non-SPD metric, degenerate frame, solver stall. CLI exit code 3.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace spacelike
