#pragma once

#include <stdexcept>
#include <string>

namespace spinlab {

/// Base class for all spinlab errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A spin value (or configuration) falls outside the allowed domain,
/// or two objects are defined over mismatched vertex sets.
struct DomainError : Error {
    using Error::Error;
};

/// Two pinnings assign conflicting values to the same vertex.
struct ConsistencyError : Error {
    using Error::Error;
};

/// The system (or a conditional of it) has total weight zero.
struct InfeasibleError : Error {
    using Error::Error;
};

/// An enumeration would exceed the configured state-space cap.
struct SizeError : Error {
    using Error::Error;
};

/// A single-site resample found all-zero conditional weights.
struct FrozenStateError : Error {
    using Error::Error;
};

/// A randomized construction exhausted its retry budget.
struct ConstructionError : Error {
    ConstructionError(const std::string& what, int rounds_attempted, int copies_attempted)
        : Error(what), rounds(rounds_attempted), copies(copies_attempted) {}
    int rounds = 0;
    int copies = 0;
};

}  // namespace spinlab
