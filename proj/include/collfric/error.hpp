#pragma once

#include <stdexcept>
#include <string>

namespace collfric {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument or object violates a documented precondition or invariant.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A computed quantity broke a physical or numerical invariant (trace,
/// Hermiticity, energy balance). Signals a bug upstream, not bad input.
class InvariantViolation : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent configuration file.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace collfric
