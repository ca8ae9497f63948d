#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rcsim {

/// Base class for every error raised by the simulator.
class SimError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid geometry, timing or run configuration. The message names the field.
class ConfigError : public SimError {
public:
    using SimError::SimError;
};

/// Physical or logical address outside the configured geometry.
class AddressError : public SimError {
public:
    using SimError::SimError;
};

/// Malformed trace or histogram input.
class ParseError : public SimError {
public:
    ParseError(std::size_t line, const std::string& what)
        : SimError("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A page became unreadable: accumulated bit errors exceed the ECC capacity.
class DataLossFault : public SimError {
public:
    using SimError::SimError;
};

/// The FTL ran out of free blocks where it needed one (misconfiguration).
class CapacityFault : public SimError {
public:
    using SimError::SimError;
};

/// A documented precondition was violated by the caller.
class ContractViolation : public SimError {
public:
    using SimError::SimError;
};

}  // namespace rcsim
