#pragma once
// Exception hierarchy shared by all twistrad modules.  The CLI maps these to
// process exit codes: ConfigError -> 1, NumericalError -> 2 (verification
// failures are reported separately and exit 3).

#include <stdexcept>
#include <string>

namespace twistrad {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid user-supplied parameters, malformed configuration or input files.
class ConfigError : public Error {
public:
    using Error::Error;
};

// A numerical procedure failed (integrator collapse, step underflow,
// quadrature breakdown, non-emitting channel requested as a rate).
class NumericalError : public Error {
public:
    using Error::Error;
};

// The Ermakov envelope dropped below the collapse guard; carries the z at
// which integration was aborted.
class EnvelopeCollapseError : public NumericalError {
public:
    EnvelopeCollapseError(const std::string& what, double z_abort)
        : NumericalError(what), z(z_abort) {}
    double z;
};

} // namespace twistrad
