#pragma once

#include <stdexcept>
#include <string>

namespace oemt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: bad config keys, unknown names, schedule gaps.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what, std::string location = {})
        : Error(what), location_(std::move(location)) {}
    const std::string& location() const { return location_; }

private:
    std::string location_;
};

/// Physically invalid request: negative rates, unstable steady state, ...
class PhysicsError : public Error {
public:
    using Error::Error;
};

/// A numerical routine failed (singular solve, lost physicality, no bracket).
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace oemt
