#pragma once

#include <stdexcept>
#include <string>

namespace nsdyn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (non-finite input,
/// state on a switching surface where a smooth branch was requested, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Caller broke an operation's precondition (e.g. a friction value outside
/// the admissible interval).
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// Invalid model name, parameter record or scenario configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Failure while advancing a trajectory: step-size underflow or a non-finite
/// derivative.
class IntegrationError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace nsdyn
