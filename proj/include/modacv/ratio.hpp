#pragma once

#include "modacv/rng.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace modacv {

/// Moment-exponent bookkeeping for the ratio-of-means estimator: from the
/// target L^p order and the moment order q of the inputs, the working
/// exponents are r = pq/(q-p) and s = p(q+2)/(q-p).
struct RatioMomentConfig {
    double p = 0.0;
    double q = 0.0;
    double r = 0.0;
    double s = 0.0;
};

[[nodiscard]] RatioMomentConfig moment_config(double p, double q);

/// (sum u_i v_i) / (sum u_i) with u_i >= 0 and a positive denominator.
[[nodiscard]] double ratio_estimate(std::span<const double> u, std::span<const double> v);

/// Dependence regimes under which the L^p rate holds, each carrying the
/// decay-rate claim it needs.
struct IidRegime {};
struct MixingRegime {
    double rate = 0.0;     ///< strong-mixing decay exponent
    double r_prime = 0.0;  ///< moment order of U, must exceed q
};
struct CausalGammaRegime {
    double rate = 0.0;
};
struct LambdaNcRegime {
    double rate = 0.0;
};
using RatioRegime = std::variant<IidRegime, MixingRegime, CausalGammaRegime, LambdaNcRegime>;

struct RatioConditionResult {
    bool pass = false;
    double threshold = 0.0;
};

/// Threshold per regime (max-of-bounds semantics, strict inequality; ties
/// fail).  The iid regime always passes.
[[nodiscard]] RatioConditionResult ratio_condition(const RatioRegime& regime,
                                                   const RatioMomentConfig& cfg);

/// Stationary (U, V) pair generators with known population ratio
/// R = E[U V] / E[U], used by the rate experiment.
class PairGenerator {
public:
    /// U = 0.5 + Bernoulli(1/2), V standard normal, all independent; R = 0.
    static PairGenerator iid_bernoulli_gaussian();

    /// W is a Gaussian AR(1); U_t = 0.75 + 0.25 * sign(W_{t-1}) looks only at
    /// the past, V_t = W_t.  R = phi * E|W| / 3 in closed form.
    static PairGenerator causal_ar1(double phi = 0.5);

    /// X_t = (e_{t-1} + e_t + e_{t+1}) / 3 for Rademacher e; U = X^2, V = X.
    /// Two-sided window, bounded by construction; R = 0 by symmetry.
    static PairGenerator noncausal_moving_average();

    void generate(std::size_t n, PhiloxRng& rng, std::vector<double>& u,
                  std::vector<double>& v) const;

    [[nodiscard]] double true_ratio() const noexcept { return true_ratio_; }
    /// Whether |U_0 V_0| is bounded (hypothesis of the lambda regime).
    [[nodiscard]] bool bounded() const noexcept { return bounded_; }
    [[nodiscard]] const std::string& name() const noexcept { return name_; }

    /// Parses "iid", "causal_ar1", "causal_ar1:PHI" or "noncausal_ma".
    static PairGenerator parse(const std::string& spec);

private:
    enum class Kind { IidBernoulliGaussian, CausalAr1, NoncausalMovingAverage };

    PairGenerator(Kind kind, double phi, double true_ratio, bool bounded, std::string name)
        : kind_(kind), phi_(phi), true_ratio_(true_ratio), bounded_(bounded),
          name_(std::move(name)) {}

    Kind kind_;
    double phi_ = 0.0;
    double true_ratio_ = 0.0;
    bool bounded_ = false;
    std::string name_;
};

struct RateExperimentResult {
    std::vector<std::size_t> n_grid;
    std::vector<double> lp_errors;  ///< (mean |R_hat - R|^p)^(1/p) per n
    double slope = 0.0;             ///< least-squares slope of log error vs log n
};

/// Monte Carlo estimate of the L^p estimation error over a geometric n-grid
/// (>= 4 increasing sizes).  Each replicate extends one simulated path across
/// the whole grid via running prefix sums.
[[nodiscard]] RateExperimentResult rate_experiment(const PairGenerator& gen, double p,
                                                   std::span<const std::size_t> n_grid,
                                                   int replicates, std::uint64_t seed,
                                                   int n_threads = 1);

}  // namespace modacv
