#pragma once

#include <stdexcept>
#include <string>

namespace bebsim {

// Raised when inputs violate a documented precondition or configuration
// constraint. The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Raised on filesystem/runtime failures. The CLI maps this to exit code 2.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace bebsim
