#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace aoci {

// Raised when an input lies outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Base class for numerical failures. Carries the best estimate reached so far
// and the error achieved, so callers can decide whether to fall back.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double best_estimate, double achieved_error)
        : std::runtime_error(what), best_estimate_(best_estimate), achieved_error_(achieved_error) {}

    [[nodiscard]] double best_estimate() const noexcept { return best_estimate_; }
    [[nodiscard]] double achieved_error() const noexcept { return achieved_error_; }

private:
    double best_estimate_;
    double achieved_error_;
};

// A series did not decay below tolerance within the per-index term cap.
class ConvergenceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Alternating cancellation made the accumulated sum untrustworthy.
class PrecisionLossError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Adaptive quadrature ran out of subdivisions.
class QuadratureError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Unscaled special-function value is not representable in double.
class OverflowError : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

// Configuration failed validation; `path` names the offending field.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string path, const std::string& message)
        : std::runtime_error(path + ": " + message), path_(std::move(path)), message_(message) {}

    [[nodiscard]] const std::string& path() const noexcept { return path_; }
    [[nodiscard]] const std::string& message() const noexcept { return message_; }

private:
    std::string path_;
    std::string message_;
};

}  // namespace aoci
