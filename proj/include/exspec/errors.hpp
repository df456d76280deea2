// errors.hpp — Exception hierarchy mapped to CLI exit codes.

#pragma once

#include <stdexcept>
#include <string>

namespace exspec {

// Invalid or inconsistent user input (config file, flags). Exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Resource limits (memory budget, register too large). Exit code 3.
class ResourceError : public std::runtime_error {
public:
    explicit ResourceError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical validation failure during a run (trace drift, non-physical state).
// Exit code 4.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace exspec
