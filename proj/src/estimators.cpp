#include "modacv/estimators.hpp"

#include "modacv/errors.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace modacv {

namespace {

// Accumulates term(lo) + term(hi) moving both indices toward the middle.
// Summing in mirrored pairs makes the result bit-identical under reversal
// of the input, which downstream code treats as an exact invariant.
template <typename Term>
double symmetric_sum(std::size_t count, Term&& term) {
    double acc = 0.0;
    std::size_t lo = 0;
    std::size_t hi = count;  // one past the last index
    while (lo + 1 < hi) {
        --hi;
        acc += term(lo) + term(hi);
        ++lo;
    }
    if (lo + 1 == hi) acc += term(lo);
    return acc;
}

void check_lag(std::size_t lag, std::size_t n) {
    if (lag >= n) {
        throw std::invalid_argument("lag " + std::to_string(lag) +
                                    " out of range for series of length " + std::to_string(n));
    }
}

// Shared worker: computes the estimate and reports zero overlap through the
// flag so acv_profile can keep going where parzen_acv throws.
AcvEstimate compute_acv(const ModulatedSeries& series, std::size_t lag, MeanMode mode) {
    const auto y = series.y();
    const auto c = series.c();
    const std::size_t n = series.size();
    check_lag(lag, n);

    AcvEstimate est;
    est.lag = lag;
    est.n_terms = n - lag;
    est.pair_weight_sum =
        symmetric_sum(est.n_terms, [&](std::size_t i) { return c[i] * c[i + lag]; });
    est.nu_hat = est.pair_weight_sum / static_cast<double>(est.n_terms);

    if (est.pair_weight_sum <= 0.0) {
        est.zero_overlap = true;
        est.gamma_tilde = std::numeric_limits<double>::quiet_NaN();
        return est;
    }

    double numerator = 0.0;
    switch (mode) {
        case MeanMode::None:
            numerator =
                symmetric_sum(est.n_terms, [&](std::size_t i) { return y[i] * y[i + lag]; });
            break;
        case MeanMode::ModulatedMean: {
            const double mean =
                symmetric_sum(n, [&](std::size_t i) { return y[i]; }) / static_cast<double>(n);
            numerator = symmetric_sum(est.n_terms, [&](std::size_t i) {
                return (y[i] - mean) * (y[i + lag] - mean);
            });
            break;
        }
        case MeanMode::RatioMean: {
            // sum(c) > 0 is implied by a positive pair weight sum.
            const double mean = symmetric_sum(n, [&](std::size_t i) { return y[i]; }) /
                                symmetric_sum(n, [&](std::size_t i) { return c[i]; });
            numerator = symmetric_sum(est.n_terms, [&](std::size_t i) {
                return (y[i] - c[i] * mean) * (y[i + lag] - c[i + lag] * mean);
            });
            break;
        }
    }
    est.gamma_tilde = numerator / est.pair_weight_sum;
    return est;
}

}  // namespace

double nu_hat(std::span<const double> c, std::size_t lag) {
    check_lag(lag, c.size());
    const std::size_t m = c.size() - lag;
    const double total = symmetric_sum(m, [&](std::size_t i) { return c[i] * c[i + lag]; });
    return total / static_cast<double>(m);
}

AcvEstimate parzen_acv(const ModulatedSeries& series, std::size_t lag, MeanMode mode) {
    AcvEstimate est = compute_acv(series, lag, mode);
    if (est.zero_overlap) throw ZeroOverlapError(lag);
    return est;
}

double parzen_acf(const ModulatedSeries& series, std::size_t lag, MeanMode mode) {
    check_lag(lag, series.size());
    const AcvEstimate base = parzen_acv(series, 0, mode);

    // Relative zero test: the centred lag-0 value of a constant series does
    // not land on exact 0.0 in floating point, only within rounding of the
    // uncentred second moment.
    const auto y = series.y();
    const double mean_sq =
        symmetric_sum(series.size(), [&](std::size_t i) { return y[i] * y[i]; }) /
        static_cast<double>(series.size());
    if (base.gamma_tilde <= 1e-20 * mean_sq) throw ZeroVarianceError();

    if (lag == 0) return 1.0;
    return parzen_acv(series, lag, mode).gamma_tilde / base.gamma_tilde;
}

std::vector<AcvEstimate> acv_profile(const ModulatedSeries& series, std::size_t max_lag,
                                     MeanMode mode) {
    check_lag(max_lag, series.size());
    std::vector<AcvEstimate> profile;
    profile.reserve(max_lag + 1);
    for (std::size_t lag = 0; lag <= max_lag; ++lag) {
        profile.push_back(compute_acv(series, lag, mode));
    }
    return profile;
}

}  // namespace modacv
