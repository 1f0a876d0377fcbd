#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace modacv {

/// No co-observed pair exists at the requested lag: every product
/// C_i * C_{i+lag} vanished, so the estimator denominator is zero.
class ZeroOverlapError : public std::runtime_error {
public:
    explicit ZeroOverlapError(std::size_t lag)
        : std::runtime_error("no co-observed pairs at lag " + std::to_string(lag)),
          lag_(lag) {}

    [[nodiscard]] std::size_t lag() const noexcept { return lag_; }

private:
    std::size_t lag_;
};

/// The lag-0 autocovariance is (numerically) zero, so autocorrelations
/// are undefined.
class ZeroVarianceError : public std::runtime_error {
public:
    ZeroVarianceError() : std::runtime_error("series has zero empirical variance") {}
};

/// A ratio denominator summed to zero.
class ZeroDenominatorError : public std::runtime_error {
public:
    ZeroDenominatorError() : std::runtime_error("denominator sum is zero") {}
};

/// A simulated recursion left the representable range (overflow / NaN),
/// usually because the model parameters violate a stationarity condition
/// that the cheap up-front checks could not detect.
class NonFiniteStateError : public std::runtime_error {
public:
    explicit NonFiniteStateError(std::size_t step)
        : std::runtime_error("simulation state became non-finite at step " +
                             std::to_string(step)) {}
};

}  // namespace modacv
