#pragma once

#include "modacv/series.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace modacv {

/// Centering policy for the pairwise products.
///  - None: the latent mean is known to be zero, use raw products.
///  - ModulatedMean: subtract the plain average of the modulated values
///    from every point (classical choice; biased under heavy censoring).
///  - RatioMean: estimate the latent mean by sum(y)/sum(c) and subtract
///    c_i times it, which matches how the mean enters a modulated point.
enum class MeanMode { None, ModulatedMean, RatioMean };

struct AcvEstimate {
    std::size_t lag = 0;
    double gamma_tilde = 0.0;      ///< weight-normalised autocovariance
    double nu_hat = 0.0;           ///< average pair weight at this lag
    double pair_weight_sum = 0.0;  ///< sum of C_i * C_{i+lag}
    std::size_t n_terms = 0;       ///< number of i-positions, N - lag
    bool zero_overlap = false;     ///< no co-observed pair; gamma_tilde is NaN
};

/// Average pair weight sum(c_i * c_{i+lag}) / (N - lag).  Weights are assumed
/// to lie in [0, 1]; the lag must satisfy lag < N.
[[nodiscard]] double nu_hat(std::span<const double> c, std::size_t lag);

/// Autocovariance of the latent process from a modulated sample: the sum of
/// centred products at the given lag divided by the sum of pair weights, so
/// each co-observed pair counts according to how strongly it was observed.
/// Throws ZeroOverlapError when the pair weights sum to zero.
[[nodiscard]] AcvEstimate parzen_acv(const ModulatedSeries& series, std::size_t lag,
                                     MeanMode mode = MeanMode::ModulatedMean);

/// Autocorrelation gamma_tilde(lag) / gamma_tilde(0).  Throws
/// ZeroVarianceError when the lag-0 value is numerically zero.
[[nodiscard]] double parzen_acf(const ModulatedSeries& series, std::size_t lag,
                                MeanMode mode = MeanMode::ModulatedMean);

/// All lags 0..max_lag.  Lags without co-observed pairs are flagged via
/// zero_overlap instead of throwing, with gamma_tilde set to NaN.
[[nodiscard]] std::vector<AcvEstimate> acv_profile(const ModulatedSeries& series,
                                                   std::size_t max_lag,
                                                   MeanMode mode = MeanMode::ModulatedMean);

}  // namespace modacv
