#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dtwa {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid or inconsistent run configuration (bad lattice, bad time grid, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Initial state whose discrete quasiprobabilities cannot be sampled
// (negative weights; only coordinate-axis product states are supported).
class UnsupportedStateError : public Error {
public:
    using Error::Error;
};

// An operation was called outside its contract (e.g. the Ising closed form
// with transverse couplings present).
class MisuseError : public Error {
public:
    using Error::Error;
};

// Exhaustive enumeration would exceed the configured support cap.
class EnumerationCapError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

// A trajectory produced non-finite state. Carries enough context to replay
// the failing trajectory in isolation.
class IntegrationDivergedError : public Error {
public:
    IntegrationDivergedError(const std::string& what, double time,
                             std::int64_t trajectory = -1, std::uint64_t seed = 0)
        : Error(what), time(time), trajectory(trajectory), seed(seed) {}

    double time = 0.0;
    std::int64_t trajectory = -1;  // -1: unknown at this level
    std::uint64_t seed = 0;
};

// Mean collective spin too small to define a squeezing direction.
class SqueezingUndefinedError : public Error {
public:
    using Error::Error;
};

}  // namespace dtwa
