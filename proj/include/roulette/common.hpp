#pragma once

#include <stdexcept>
#include <string>

namespace roulette {

/// Thrown when an operation's precondition is not met by its arguments.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a configured resource ceiling (exact-mode size, quadrature
/// budget) would be exceeded.
class ResourceLimitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown when a hard invariant is observed to fail at runtime.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw ValidationError(message);
}

}  // namespace roulette
