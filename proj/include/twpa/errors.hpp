#pragma once

#include <stdexcept>
#include <string>

namespace twpa {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Frequency falls inside a resonator stop band of the loaded line.
struct StopbandError : Error {
    using Error::Error;
};

// Pump amplitude |beta| >= 1/4, i.e. pump current would exceed the
// junction critical current.
struct OverdriveError : Error {
    using Error::Error;
};

struct IntegrationError : Error {
    using Error::Error;
};

struct FitDivergence : Error {
    using Error::Error;
};

struct IdentifiabilityError : Error {
    using Error::Error;
};

struct TableRangeError : Error {
    using Error::Error;
};

struct NonPhysicalVariance : Error {
    using Error::Error;
};

struct DegenerateData : Error {
    using Error::Error;
};

struct LengthMismatch : Error {
    using Error::Error;
};

struct FrequencyMismatch : Error {
    using Error::Error;
};

struct UnwrapError : Error {
    using Error::Error;
};

struct QuantumBoundViolation : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

} // namespace twpa
