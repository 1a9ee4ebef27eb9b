#pragma once

#include <stdexcept>
#include <string>

namespace damcmc {

// Base class so callers can catch toolkit failures separately from std ones.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Incompatible vector/matrix dimensions between configured pieces.
struct DimensionError : Error {
    using Error::Error;
};

// A matrix that must be symmetric positive definite is not; carries the
// offending context in the message.  Never "fixed" by silent regularization.
struct FactorizationError : Error {
    using Error::Error;
};

// A forward solve failed; message carries the parameter vector and solver
// context so the failure is reproducible.
struct ForwardModelError : Error {
    using Error::Error;
};

// Bad or inconsistent run configuration (unknown key, invalid combination).
struct ConfigError : Error {
    using Error::Error;
};

// A diagnostic estimator was handed input it cannot work with
// (e.g. a constant series).
struct DiagnosticsError : Error {
    using Error::Error;
};

// Retry budget exhausted or other mid-run failure; the run driver attaches
// the checkpoint path it wrote before aborting.
struct RunAbort : Error {
    RunAbort(const std::string& what, std::string checkpoint)
        : Error(what), checkpoint_path(std::move(checkpoint)) {}
    std::string checkpoint_path;
};

}  // namespace damcmc
