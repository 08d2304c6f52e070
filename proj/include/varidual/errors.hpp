#pragma once

#include <stdexcept>
#include <string>

namespace varidual {

// Caller violated a documented precondition (bad dimension, bad argument).
struct UsageError : std::invalid_argument {
    explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

// Sampling box does not intersect the effective domain of the integrand.
struct EmptyDomainError : std::runtime_error {
    explicit EmptyDomainError(const std::string& what) : std::runtime_error(what) {}
};

// Point lies on or outside the closure of the effective domain.
struct OutsideDomainError : std::runtime_error {
    explicit OutsideDomainError(const std::string& what) : std::runtime_error(what) {}
};

// Dual grid does not cover the requested truncation ball.
struct GridTooSmallError : std::runtime_error {
    explicit GridTooSmallError(const std::string& what) : std::runtime_error(what) {}
};

// Approximant cache spacing is too coarse for the requested smoothing radius.
struct CacheTooCoarseError : std::runtime_error {
    explicit CacheTooCoarseError(const std::string& what) : std::runtime_error(what) {}
};

// Obstacle incompatible with the boundary data.
struct InfeasibleConstraintError : std::runtime_error {
    explicit InfeasibleConstraintError(const std::string& what) : std::runtime_error(what) {}
};

// Solver start point has infinite energy.
struct InfeasibleStartError : std::runtime_error {
    explicit InfeasibleStartError(const std::string& what) : std::runtime_error(what) {}
};

// Dual field leaves the sampled dual box.
struct DualBoxExceededError : std::runtime_error {
    explicit DualBoxExceededError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace varidual
