#pragma once

#include <stdexcept>
#include <string>

namespace rrc {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GridTooSmallError : Error {
    using Error::Error;
};

struct InvalidPotentialError : Error {
    using Error::Error;
};

struct SolverFailureError : Error {
    SolverFailureError(const std::string& msg, int iterations_)
        : Error(msg), iterations(iterations_) {}
    int iterations;
};

struct BasisTruncationError : Error {
    BasisTruncationError(const std::string& msg, double residual_)
        : Error(msg), residual(residual_) {}
    double residual;
};

struct TimestepTooLargeError : Error {
    using Error::Error;
};

struct IntegratorInstabilityError : Error {
    using Error::Error;
};

struct InsufficientDataError : Error {
    using Error::Error;
};

struct DomainError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace rrc
