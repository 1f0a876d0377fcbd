#include "modacv/spectral.hpp"

#include "modacv/estimators.hpp"
#include "modacv/rng.hpp"
#include "modacv/series.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace modacv {
namespace {

ModulatedSeries gaussian_full_series(std::uint64_t seed, std::size_t n) {
    PhiloxRng rng(seed, 0);
    std::vector<double> y(n);
    for (double& v : y) v = rng.normal();
    return {y, std::vector<double>(n, 1.0)};
}

TEST(SpectralFunctional, CoefficientsAreMirrored) {
    const SpectralFunctional g({{0, 1.0}, {2, 0.5}}, 2.0);
    EXPECT_DOUBLE_EQ(g.coeff(0), 1.0);
    EXPECT_DOUBLE_EQ(g.coeff(2), 0.5);
    EXPECT_DOUBLE_EQ(g.coeff(-2), 0.5);
    EXPECT_DOUBLE_EQ(g.coeff(1), 0.0);
    EXPECT_EQ(g.max_lag(), 2);
    EXPECT_DOUBLE_EQ(g.sobolev_index(), 2.0);
    // g(0) = g_0 + 2 g_2.
    EXPECT_DOUBLE_EQ(g(0.0), 2.0);
    EXPECT_NEAR(g(std::numbers::pi), 2.0, 1e-12);  // cos(2 pi) = 1

    // Zero coefficients do not extend the support.
    const SpectralFunctional trivial({{0, 1.0}, {5, 0.0}}, 2.0);
    EXPECT_EQ(trivial.max_lag(), 0);
}

TEST(SpectralFunctional, ConstructionAndParsing) {
    EXPECT_THROW(SpectralFunctional({{-1, 0.5}}, 2.0), std::invalid_argument);
    EXPECT_THROW(SpectralFunctional({{0, 1.0}}, 1.0), std::invalid_argument);
    const double inf = std::numeric_limits<double>::infinity();
    EXPECT_THROW(SpectralFunctional({{0, inf}}, 2.0), std::invalid_argument);

    const SpectralFunctional g = SpectralFunctional::parse("0:1,2:0.5", 2.0);
    EXPECT_DOUBLE_EQ(g.coeff(2), 0.5);
    // Repeated lags accumulate.
    EXPECT_DOUBLE_EQ(SpectralFunctional::parse("1:0.5,1:0.25", 2.0).coeff(1), 0.75);
    EXPECT_THROW(SpectralFunctional::parse("", 2.0), std::invalid_argument);
    EXPECT_THROW(SpectralFunctional::parse("1", 2.0), std::invalid_argument);
    EXPECT_THROW(SpectralFunctional::parse("x:1", 2.0), std::invalid_argument);
    EXPECT_THROW(SpectralFunctional::parse("1:x", 2.0), std::invalid_argument);
    EXPECT_THROW(SpectralFunctional::parse("-1:0.5", 2.0), std::invalid_argument);
}

TEST(SpectralNorms, ClosedFormValues) {
    // 1 + 2 * (1+2)^2 * 0.25 = 5.5
    const SpectralFunctional g({{0, 1.0}, {2, 0.5}}, 2.0);
    EXPECT_DOUBLE_EQ(sobolev_norm(g), std::sqrt(5.5));

    // 1 + 2 * (1+1)^-2 * 9 = 5.5
    const std::map<long, double> d = {{0, 1.0}, {1, 3.0}};
    EXPECT_DOUBLE_EQ(dual_error(d, 2.0), std::sqrt(5.5));

    EXPECT_THROW(dual_error({{-1, 1.0}}, 2.0), std::invalid_argument);
    EXPECT_THROW(dual_error(d, 1.0), std::invalid_argument);
}

TEST(SpectralSum, TrigPolynomial) {
    const std::vector<double> acv = {1.0, 0.5};
    EXPECT_DOUBLE_EQ(spectral_sum(acv, 0.0), 2.0);
    EXPECT_NEAR(spectral_sum(acv, std::numbers::pi), 0.0, 1e-12);
    EXPECT_THROW(spectral_sum(std::vector<double>{}, 0.0), std::invalid_argument);
}

TEST(ModifiedPeriodogram, MatchesTheSpectralSumOfTheProfile) {
    const ModulatedSeries series = gaussian_full_series(17, 300);
    const std::vector<double> freqs = {0.0, 0.3, 1.0, std::numbers::pi};
    const std::size_t max_lag = 5;
    const PeriodogramResult result =
        modified_periodogram(series, freqs, max_lag, MeanMode::ModulatedMean);
    ASSERT_EQ(result.values.size(), freqs.size());
    EXPECT_TRUE(result.flagged_lags.empty());

    const auto profile = acv_profile(series, max_lag, MeanMode::ModulatedMean);
    std::vector<double> acv;
    for (const auto& est : profile) acv.push_back(est.gamma_tilde);
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        EXPECT_DOUBLE_EQ(result.values[i], spectral_sum(acv, freqs[i]));
    }
}

TEST(ModifiedPeriodogram, IsEvenInFrequency) {
    const ModulatedSeries series = gaussian_full_series(18, 200);
    const std::vector<double> freqs = {0.7, -0.7, 2.1, -2.1};
    const PeriodogramResult result = modified_periodogram(series, freqs, 4);
    EXPECT_DOUBLE_EQ(result.values[0], result.values[1]);
    EXPECT_DOUBLE_EQ(result.values[2], result.values[3]);
}

TEST(ModifiedPeriodogram, FlagsLagsWithoutOverlap) {
    // Alternating pattern: odd lags have no co-observed pairs.
    std::vector<double> y(64), c(64);
    for (std::size_t i = 0; i < 64; ++i) {
        c[i] = i % 2 == 0 ? 1.0 : 0.0;
        y[i] = c[i] * std::sin(static_cast<double>(i));
    }
    const ModulatedSeries series(y, c);
    const std::vector<double> freqs = {0.0, 0.5};
    const PeriodogramResult result = modified_periodogram(series, freqs, 3, MeanMode::None);
    EXPECT_EQ(result.flagged_lags, (std::vector<std::size_t>{1, 3}));
    for (const double v : result.values) EXPECT_TRUE(std::isfinite(v));

    const SpectralFunctional g({{0, 1.0}, {1, 0.5}}, 2.0);
    const FunctionalEstimate est = integrated_functional(series, g, 3, MeanMode::None);
    EXPECT_EQ(est.flagged_lags, (std::vector<std::size_t>{1}));
    const auto profile = acv_profile(series, 1, MeanMode::None);
    EXPECT_DOUBLE_EQ(est.value, profile[0].gamma_tilde);  // only the lag-0 term survives
}

TEST(ModifiedPeriodogram, ValidatesItsInputs) {
    const ModulatedSeries series = gaussian_full_series(19, 50);
    const std::vector<double> ok = {0.0};
    EXPECT_THROW(modified_periodogram(series, ok, 50), std::invalid_argument);
    const std::vector<double> far = {4.0};
    EXPECT_THROW(modified_periodogram(series, far, 3), std::invalid_argument);
}

TEST(IntegratedFunctional, MatchesThePlugInSum) {
    const ModulatedSeries series = gaussian_full_series(20, 400);
    const SpectralFunctional g({{0, 1.0}, {1, 0.5}, {3, -0.25}}, 2.0);
    const FunctionalEstimate est = integrated_functional(series, g, 5);
    const auto profile = acv_profile(series, 3, MeanMode::ModulatedMean);
    const double expected = profile[0].gamma_tilde + 2.0 * 0.5 * profile[1].gamma_tilde +
                            2.0 * -0.25 * profile[3].gamma_tilde;
    EXPECT_NEAR(est.value, expected, 1e-12);
    EXPECT_TRUE(est.flagged_lags.empty());

    EXPECT_THROW(integrated_functional(series, g, 2), std::invalid_argument);
    const ModulatedSeries tiny = gaussian_full_series(21, 3);
    EXPECT_THROW(integrated_functional(tiny, g, 3), std::invalid_argument);
}

TEST(IntegratedFunctional, EqualsTheFrequencyAverage) {
    // For trig polynomials the plug-in sum equals (1/2pi) integral g * I~,
    // and the midpoint rule is exact once the grid outruns the harmonics.
    const ModulatedSeries series = gaussian_full_series(22, 256);
    const SpectralFunctional g({{0, 1.0}, {1, 0.5}, {2, 0.25}, {3, 0.125}}, 2.0);
    const std::size_t top = static_cast<std::size_t>(g.max_lag());

    const std::size_t m = 4096;
    std::vector<double> freqs(m);
    for (std::size_t j = 0; j < m; ++j) {
        freqs[j] = -std::numbers::pi +
                   (static_cast<double>(j) + 0.5) * (2.0 * std::numbers::pi / m);
    }
    const PeriodogramResult pg = modified_periodogram(series, freqs, top);
    double average = 0.0;
    for (std::size_t j = 0; j < m; ++j) average += g(freqs[j]) * pg.values[j];
    average /= static_cast<double>(m);

    const FunctionalEstimate est = integrated_functional(series, g, top);
    EXPECT_NEAR(est.value, average, 1e-10);
}

TEST(DefaultPeriodogramLag, CubeRootFloor) {
    EXPECT_EQ(default_periodogram_lag(1), 1u);
    EXPECT_EQ(default_periodogram_lag(8), 2u);
    EXPECT_EQ(default_periodogram_lag(26), 2u);
    EXPECT_EQ(default_periodogram_lag(27), 3u);
    EXPECT_EQ(default_periodogram_lag(1000), 10u);
}

TEST(SpectralConvergence, ErrorDecaysAtTheParametricRate) {
    const ProcessModel process = parse_process("ar1:0.5:gaussian:1");
    const CensorModel censor = ConstantCensor{1.0};
    const SpectralFunctional g({{0, 1.0}, {1, 0.5}}, 2.0);
    const std::vector<std::size_t> grid = {512, 1024, 2048, 4096};
    const SpectralConvergenceResult res =
        spectral_convergence_experiment(process, censor, g, grid, 100, 11);
    ASSERT_EQ(res.mean_sq_dual_error.size(), grid.size());
    for (const double v : res.mean_sq_dual_error) EXPECT_GT(v, 0.0);
    EXPECT_TRUE(res.strictly_decreasing);
    // Squared error of a root-n quantity: slope near -1.
    EXPECT_GT(res.slope, -1.5);
    EXPECT_LT(res.slope, -0.5);

    // The scaled functional discrepancies keep a replicate column per grid
    // point and stay balanced around zero.
    ASSERT_EQ(res.functional_discrepancies.size(), grid.size());
    for (const std::vector<double>& column : res.functional_discrepancies) {
        ASSERT_EQ(column.size(), 100u);
        double mean = 0.0;
        for (const double v : column) {
            EXPECT_TRUE(std::isfinite(v));
            mean += v;
        }
        mean /= static_cast<double>(column.size());
        EXPECT_LT(std::abs(mean), 1.0);
    }
}

TEST(SpectralConvergence, FunctionalDiscrepancyMatchesAHandComputedReplicate) {
    const ProcessModel process = parse_process("ar1:0.5:gaussian:1");
    const CensorModel censor = ConstantCensor{1.0};
    const SpectralFunctional g({{0, 1.0}}, 2.0);
    const std::vector<std::size_t> grid = {256, 512};
    const SpectralConvergenceResult res =
        spectral_convergence_experiment(process, censor, g, grid, 3, 77);

    // Replicate (grid point 0, replicate 0) by hand: with g supported on
    // lag 0 the discrepancy is sqrt(n) * (gamma_tilde(0) - gamma(0)).
    PhiloxRng xs(77, compose_stream(0, 0, 0));
    PhiloxRng cs(77, compose_stream(0, 0, 1));
    const std::vector<double> x = simulate(process, 256, xs, 1000);
    const std::vector<double> c = simulate_censor(censor, 256, cs);
    const ModulatedSeries series = modulate(x, c);
    const AcvEstimate est = parzen_acv(series, 0, MeanMode::None);
    const double expected = std::sqrt(256.0) * (est.gamma_tilde - 4.0 / 3.0);
    ASSERT_EQ(res.functional_discrepancies[0].size(), 3u);
    EXPECT_DOUBLE_EQ(res.functional_discrepancies[0][0], expected);
}

TEST(SpectralConvergence, DeterministicAndThreadInvariant) {
    const ProcessModel process = parse_process("ar1:0.5:gaussian:1");
    const CensorModel censor = IidBernoulliCensor{0.7};
    const SpectralFunctional g({{0, 1.0}, {1, 0.5}}, 2.0);
    const std::vector<std::size_t> grid = {256, 512};
    const auto a = spectral_convergence_experiment(process, censor, g, grid, 40, 3, 1);
    const auto b = spectral_convergence_experiment(process, censor, g, grid, 40, 3, 1);
    const auto c = spectral_convergence_experiment(process, censor, g, grid, 40, 3, 3);
    EXPECT_EQ(a.mean_sq_dual_error, b.mean_sq_dual_error);
    EXPECT_EQ(a.mean_sq_dual_error, c.mean_sq_dual_error);
    EXPECT_EQ(a.functional_discrepancies, b.functional_discrepancies);
    EXPECT_EQ(a.functional_discrepancies, c.functional_discrepancies);
    EXPECT_EQ(a.slope, c.slope);
}

TEST(SpectralConvergence, ValidatesItsInputs) {
    const SpectralFunctional g({{0, 1.0}, {1, 0.5}}, 2.0);
    const CensorModel censor = ConstantCensor{1.0};
    const std::vector<std::size_t> grid = {256, 512};
    // No closed-form autocovariance for the scale recursion.
    EXPECT_THROW(spectral_convergence_experiment(parse_process("arch:0.5:0.5:gaussian:1"),
                                                 censor, g, grid, 10, 1),
                 std::invalid_argument);
    const ProcessModel ok = parse_process("ar1:0.5:gaussian:1");
    const std::vector<std::size_t> single = {256};
    EXPECT_THROW(spectral_convergence_experiment(ok, censor, g, single, 10, 1),
                 std::invalid_argument);
    const std::vector<std::size_t> low = {1, 256};
    EXPECT_THROW(spectral_convergence_experiment(ok, censor, g, low, 10, 1),
                 std::invalid_argument);
    const std::vector<std::size_t> flat = {256, 256};
    EXPECT_THROW(spectral_convergence_experiment(ok, censor, g, flat, 10, 1),
                 std::invalid_argument);
    EXPECT_THROW(spectral_convergence_experiment(ok, censor, g, grid, 0, 1),
                 std::invalid_argument);
}

}  // namespace
}  // namespace modacv
