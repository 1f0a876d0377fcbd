#pragma once

#include "modacv/asymptotics.hpp"
#include "modacv/censor.hpp"
#include "modacv/ratio.hpp"
#include "modacv/simulators.hpp"
#include "modacv/spectral.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace modacv {

/// Empirical distribution distance sup_x |F_n(x) - F(x)| for a continuous
/// reference CDF.
[[nodiscard]] double ks_distance(std::span<const double> sample,
                                 const std::function<double(double)>& cdf);

[[nodiscard]] double standard_normal_cdf(double z);

/// Gates every experiment's pass flag; fixed here so reports are comparable
/// across configurations.
struct MonteCarloThresholds {
    double variance_gap = 0.10;        ///< per-lag relative gap to theory
    double ks = 0.05;                  ///< KS distance to standard normal
    double coverage_lo = 0.93;         ///< 95% CI coverage window
    double coverage_hi = 0.97;
    double joint_gap = 0.15;           ///< joint covariance entry gap
    double joint_absolute_floor = 0.05;  ///< |theory| below this: compare absolutely
    double slln_min_fraction = 0.95;   ///< nonincreasing trajectories
    double ratio_slope_lo = -0.6;      ///< L^p rate slope window
    double ratio_slope_hi = -0.4;
    double spectral_slope_lo = -1.2;   ///< squared dual error slope window
    double spectral_slope_hi = -0.8;
};

[[nodiscard]] const MonteCarloThresholds& mc_thresholds() noexcept;

struct CltLagStats {
    long lag = 0;
    double sigma2_theory = 0.0;
    double var_empirical = 0.0;              ///< statistic normalised by empirical nu
    double var_empirical_analytic_nu = 0.0;  ///< same with the exact censor nu
    double relative_gap = 0.0;
    double ks_distance = 0.0;
    double ci_coverage95 = 0.0;
    bool pass = false;
};

struct CltReport {
    std::string process;
    std::string censor;
    std::vector<long> lags;
    std::size_t n = 0;
    int replicates = 0;
    std::uint64_t seed = 0;
    std::size_t burnin = 0;
    long truncation = 0;
    double moment_m = 0.0;

    ConditionCheck condition;
    std::vector<CltLagStats> per_lag;
    std::vector<std::vector<double>> sigma_theory;   ///< joint matrix (lags x lags)
    std::vector<std::vector<double>> cov_empirical;
    double joint_max_gap = 0.0;
    bool joint_pass = true;
    int skipped_replicates = 0;
    bool pass = false;
    double wall_seconds = 0.0;  ///< diagnostics only, never serialized
};

/// Simulates R censored paths and compares the scaled estimation error
/// sqrt(N) * nu_hat(l) * (gamma~(l) - gamma(l)) against its limiting normal
/// law: variance vs sigma2, KS normality, CI coverage, and (for several
/// lags) the joint covariance vs sigma_matrix.  Requires a process with
/// closed-form autocovariance and at least 100 replicates.
[[nodiscard]] CltReport clt_experiment(const ProcessModel& process, const CensorModel& censor,
                                       std::span<const long> lags, std::size_t n, int replicates,
                                       std::uint64_t seed, long truncation = 0, int n_threads = 1,
                                       std::size_t burnin = 1000, double moment_m = 5.0);

struct SllnReport {
    std::string process;
    std::string censor;
    long lag = 0;
    std::vector<std::size_t> checkpoints;
    int trajectories = 0;
    std::uint64_t seed = 0;
    std::size_t burnin = 0;

    /// sup_{n >= n0} |gamma~_n(l) - gamma(l)| per trajectory and checkpoint n0.
    std::vector<std::vector<double>> sup_errors;
    std::vector<bool> nonincreasing;
    double fraction_nonincreasing = 0.0;
    bool pass = false;
    double wall_seconds = 0.0;
};

/// Follows each trajectory's running autocovariance at every sample size up
/// to the last checkpoint and reports the tail sup-error per checkpoint.
[[nodiscard]] SllnReport slln_experiment(const ProcessModel& process, const CensorModel& censor,
                                         long lag, std::span<const std::size_t> checkpoints,
                                         int trajectories, std::uint64_t seed, int n_threads = 1,
                                         std::size_t burnin = 1000);

struct RatioReport {
    std::string generator;
    double p = 2.0;
    double q = 4.0;
    std::string regime;  ///< empty when no condition check was requested
    RatioConditionResult condition;
    bool has_condition = false;
    std::vector<std::size_t> n_grid;
    int replicates = 0;
    std::uint64_t seed = 0;
    std::vector<double> lp_errors;
    double slope = 0.0;
    bool pass = false;
    double wall_seconds = 0.0;
};

/// rate_experiment plus regime bookkeeping.  `regime_spec` is empty or one of
/// "iid", "mixing:RATE:RPRIME", "causal:RATE", "lambda_nc:RATE"; the lambda
/// regime additionally insists on a bounded generator.
[[nodiscard]] RatioReport ratio_rate_report(const PairGenerator& gen, double p, double q,
                                            const std::string& regime_spec,
                                            std::span<const std::size_t> n_grid, int replicates,
                                            std::uint64_t seed, int n_threads = 1);

struct SpectralReport {
    std::string process;
    std::string censor;
    std::string functional;
    double sobolev_index = 2.0;
    std::vector<std::size_t> n_grid;
    int replicates = 0;
    std::uint64_t seed = 0;
    std::size_t burnin = 0;
    std::vector<double> mean_sq_dual_error;
    /// KS distance of the scaled functional discrepancies against a normal
    /// law fitted per grid point; informational, never part of pass.  NaN
    /// when fewer than two replicates or a degenerate spread.
    std::vector<double> functional_ks;
    double slope = 0.0;
    bool strictly_decreasing = false;
    bool pass = false;
    double wall_seconds = 0.0;
};

[[nodiscard]] SpectralReport spectral_report(const ProcessModel& process,
                                             const CensorModel& censor,
                                             const SpectralFunctional& g,
                                             const std::string& functional_spec,
                                             std::span<const std::size_t> n_grid, int replicates,
                                             std::uint64_t seed, int n_threads = 1,
                                             std::size_t burnin = 1000);

[[nodiscard]] nlohmann::ordered_json to_json(const CltReport& report);
[[nodiscard]] nlohmann::ordered_json to_json(const SllnReport& report);
[[nodiscard]] nlohmann::ordered_json to_json(const RatioReport& report);
[[nodiscard]] nlohmann::ordered_json to_json(const SpectralReport& report);

struct SuiteOutcome {
    std::string id;
    std::string kind;
    bool ok = false;    ///< ran to completion
    bool pass = false;  ///< the report's own pass flag
    std::string file;   ///< report path relative to the output directory
    std::string error;  ///< failure message when !ok
};

/// Runs every experiment listed in a flat key-value config (see README for
/// the format), writing one JSON report per experiment plus summary.json
/// into out_dir.  Per-experiment failures are captured in the summary, not
/// propagated.  Returns the outcomes in declaration order.
std::vector<SuiteOutcome> run_suite(const std::string& config_path, const std::string& out_dir,
                                    int n_threads = 1);

}  // namespace modacv
