#pragma once

#include <stdexcept>

namespace supframe {

/// Base class for every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A constructed value violates one of its invariants
/// (non-orthogonal rotation, empty support, bad grid size, ...).
struct ValidationError : Error {
    using Error::Error;
};

/// Two operands do not fit together: frame chains that do not line up,
/// wavefunctions on different groups, fields on different grids.
struct MismatchError : Error {
    using Error::Error;
};

/// Operation applied outside its domain, e.g. collapsing onto a
/// transform that is not in the support.
struct DomainError : Error {
    using Error::Error;
};

/// Probabilities requested from a state whose total weight vanishes.
struct DegenerateStateError : Error {
    using Error::Error;
};

/// A transform pushed more wavefunction mass off the grid than allowed.
struct ClippingError : Error {
    using Error::Error;
};

/// Scenario file cannot be parsed or fails schema validation.
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace supframe
