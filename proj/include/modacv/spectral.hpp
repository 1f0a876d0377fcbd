#pragma once

#include "modacv/censor.hpp"
#include "modacv/estimators.hpp"
#include "modacv/simulators.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace modacv {

/// Even real trigonometric polynomial g(x) = sum_l g_l e^(ilx) together with
/// the smoothness index s of the space it is measured in.  Coefficients are
/// stored for l >= 0 and mirrored, so the evenness constraint holds by
/// construction.
class SpectralFunctional {
public:
    SpectralFunctional(std::map<long, double> coeffs, double sobolev_index);

    /// g_l for any sign of l.
    [[nodiscard]] double coeff(long l) const;
    [[nodiscard]] long max_lag() const noexcept { return max_lag_; }
    [[nodiscard]] double sobolev_index() const noexcept { return s_; }
    [[nodiscard]] const std::map<long, double>& coeffs() const noexcept { return coeffs_; }

    /// Pointwise evaluation g(x) = g_0 + 2 * sum_{l>=1} g_l cos(l x).
    [[nodiscard]] double operator()(double x) const;

    /// Parses "L:VALUE,L:VALUE,..." with non-negative lags.
    static SpectralFunctional parse(const std::string& spec, double sobolev_index);

private:
    std::map<long, double> coeffs_;
    double s_;
    long max_lag_ = 0;
};

/// sqrt(g_0^2 + 2 * sum_{l>=1} (1+l)^s g_l^2).
[[nodiscard]] double sobolev_norm(const SpectralFunctional& g);

/// Weighted l2 size of a discrepancy map (keys l >= 0, mirrored):
/// sqrt(d_0^2 + 2 * sum_{l>=1} (1+l)^(-s) d_l^2).  Used as the dual-space
/// distance between an estimated and a true second-order structure.
[[nodiscard]] double dual_error(const std::map<long, double>& discrepancies, double s);

struct PeriodogramResult {
    std::vector<double> values;              ///< one per grid frequency
    std::vector<std::size_t> flagged_lags;   ///< lags that had no co-observed pair
};

/// Truncated spectral sum I(x) = g~(0) + 2 * sum_{l=1..L} g~(l) cos(l x)
/// built from the weight-normalised autocovariances.  Lags without
/// co-observed pairs contribute zero and are flagged.
[[nodiscard]] PeriodogramResult modified_periodogram(const ModulatedSeries& series,
                                                     std::span<const double> freq_grid,
                                                     std::size_t max_lag,
                                                     MeanMode mode = MeanMode::ModulatedMean);

/// The same trig sum on externally supplied autocovariances (index = lag).
[[nodiscard]] double spectral_sum(std::span<const double> acv, double freq);

struct FunctionalEstimate {
    double value = 0.0;
    std::vector<std::size_t> flagged_lags;
};

/// Plug-in linear functional sum_l g_l * gamma~(|l|) over the support of g;
/// equals the 1/(2pi) integral of g times the spectral sum for trig
/// polynomials.  The support must fit below max_lag.
[[nodiscard]] FunctionalEstimate integrated_functional(const ModulatedSeries& series,
                                                       const SpectralFunctional& g,
                                                       std::size_t max_lag,
                                                       MeanMode mode = MeanMode::ModulatedMean);

/// Display default for the periodogram truncation lag: floor(N^(1/3)).
[[nodiscard]] std::size_t default_periodogram_lag(std::size_t n) noexcept;

struct SpectralConvergenceResult {
    std::vector<std::size_t> n_grid;
    std::vector<double> mean_sq_dual_error;  ///< MC mean of the squared dual error per n
    /// sqrt(n) * (estimated - exact integrated functional), one inner vector
    /// per grid point; raw material for distribution checks downstream.
    std::vector<std::vector<double>> functional_discrepancies;
    double slope = 0.0;
    bool strictly_decreasing = false;
};

/// Simulates the process + censor pair at each sample size and measures the
/// squared dual-norm discrepancy between estimated and exact autocovariances
/// over the support lags of g.  Requires a model with analytic gamma.
[[nodiscard]] SpectralConvergenceResult spectral_convergence_experiment(
    const ProcessModel& process, const CensorModel& censor, const SpectralFunctional& g,
    std::span<const std::size_t> n_grid, int replicates, std::uint64_t seed, int n_threads = 1,
    std::size_t burnin = 1000);

}  // namespace modacv
