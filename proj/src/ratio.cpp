#include "modacv/ratio.hpp"

#include "modacv/errors.hpp"
#include "modacv/parallel.hpp"
#include "modacv/simulators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace modacv {

RatioMomentConfig moment_config(double p, double q) {
    if (!(p > 0.0 && q > p)) {
        throw std::invalid_argument("moment orders must satisfy 0 < p < q");
    }
    RatioMomentConfig cfg;
    cfg.p = p;
    cfg.q = q;
    cfg.r = p * q / (q - p);
    cfg.s = p * (q + 2.0) / (q - p);
    return cfg;
}

double ratio_estimate(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw std::invalid_argument("u and v differ in length");
    if (u.empty()) throw std::invalid_argument("empty input");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!(u[i] >= 0.0)) {
            throw std::invalid_argument("u must be non-negative (index " + std::to_string(i) +
                                        ")");
        }
        num += u[i] * v[i];
        den += u[i];
    }
    if (den == 0.0) throw ZeroDenominatorError();
    return num / den;
}

namespace {

bool is_even_integer(double x) {
    if (x != std::floor(x)) return false;
    const long n = static_cast<long>(x);
    return n % 2 == 0;
}

}  // namespace

RatioConditionResult ratio_condition(const RatioRegime& regime, const RatioMomentConfig& cfg) {
    if (!(cfg.p > 0.0 && cfg.q > cfg.p)) {
        throw std::invalid_argument("invalid moment configuration");
    }
    return std::visit(
        [&cfg](const auto& reg) -> RatioConditionResult {
            using T = std::decay_t<decltype(reg)>;
            if constexpr (std::is_same_v<T, IidRegime>) {
                return {true, 0.0};
            } else if constexpr (std::is_same_v<T, MixingRegime>) {
                if (!(reg.r_prime > cfg.q)) {
                    throw std::invalid_argument("mixing regime requires r' > q");
                }
                const double lhs = 0.5 * cfg.p * cfg.r / (cfg.r - cfg.p);
                const double rhs = 0.5 * cfg.q * reg.r_prime / (reg.r_prime - cfg.p);
                const double threshold = std::max(lhs, rhs);
                return {reg.rate > threshold, threshold};
            } else if constexpr (std::is_same_v<T, CausalGammaRegime>) {
                const double lhs = 0.5 * cfg.p * (cfg.r - 1.0) / (cfg.r - cfg.p);
                const double threshold = std::max(lhs, 0.5 * cfg.q);
                return {reg.rate > threshold, threshold};
            } else {
                if (!is_even_integer(cfg.p) || !is_even_integer(cfg.q) || cfg.p < 2.0) {
                    throw std::invalid_argument(
                        "lambda regime requires even integer moments p, q >= 2");
                }
                const double threshold = 0.5 * cfg.q;
                return {reg.rate > threshold, threshold};
            }
        },
        regime);
}

PairGenerator PairGenerator::iid_bernoulli_gaussian() {
    return {Kind::IidBernoulliGaussian, 0.0, 0.0, false, "iid"};
}

PairGenerator PairGenerator::causal_ar1(double phi) {
    if (!(std::abs(phi) < 1.0)) throw std::invalid_argument("causal_ar1 requires |phi| < 1");
    // E[UV] = E[(0.75 + 0.25 sign(W_{t-1})) W_t] = 0.25 * phi * E|W| and
    // E[U] = 0.75, so R = phi * E|W| / 3 with E|W| the folded-normal mean
    // of the stationary AR(1) law.
    const double var = 1.0 / (1.0 - phi * phi);
    const double mean_abs = std::sqrt(2.0 * var / std::numbers::pi);
    return {Kind::CausalAr1, phi, phi * mean_abs / 3.0, false, "causal_ar1"};
}

PairGenerator PairGenerator::noncausal_moving_average() {
    return {Kind::NoncausalMovingAverage, 0.0, 0.0, true, "noncausal_ma"};
}

void PairGenerator::generate(std::size_t n, PhiloxRng& rng, std::vector<double>& u,
                             std::vector<double>& v) const {
    if (n == 0) throw std::invalid_argument("cannot generate an empty pair sequence");
    u.resize(n);
    v.resize(n);
    switch (kind_) {
        case Kind::IidBernoulliGaussian:
            for (std::size_t i = 0; i < n; ++i) {
                u[i] = rng.uniform01() < 0.5 ? 0.5 : 1.5;
                v[i] = rng.normal();
            }
            return;
        case Kind::CausalAr1: {
            const Ar1Model model{phi_, Innovation::gaussian(1.0)};
            const std::vector<double> w = simulate(model, n + 1, rng, 1000);
            for (std::size_t i = 0; i < n; ++i) {
                u[i] = 0.75 + (w[i] < 0.0 ? -0.25 : 0.25);
                v[i] = w[i + 1];
            }
            return;
        }
        case Kind::NoncausalMovingAverage: {
            std::vector<double> e(n + 2);
            for (double& x : e) x = rng.uniform01() < 0.5 ? -1.0 : 1.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double x = (e[i] + e[i + 1] + e[i + 2]) / 3.0;
                u[i] = x * x;
                v[i] = x;
            }
            return;
        }
    }
    throw std::invalid_argument("unknown generator kind");
}

PairGenerator PairGenerator::parse(const std::string& spec) {
    if (spec == "iid") return iid_bernoulli_gaussian();
    if (spec == "noncausal_ma") return noncausal_moving_average();
    if (spec == "causal_ar1") return causal_ar1();
    const std::string prefix = "causal_ar1:";
    if (spec.rfind(prefix, 0) == 0) {
        try {
            std::size_t used = 0;
            const double phi = std::stod(spec.substr(prefix.size()), &used);
            if (used != spec.size() - prefix.size()) throw std::invalid_argument(spec);
            return causal_ar1(phi);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad generator spec '" + spec + "'");
        }
    }
    throw std::invalid_argument("unknown generator '" + spec + "'");
}

RateExperimentResult rate_experiment(const PairGenerator& gen, double p,
                                     std::span<const std::size_t> n_grid, int replicates,
                                     std::uint64_t seed, int n_threads) {
    if (!(p > 0.0)) throw std::invalid_argument("p must be positive");
    if (n_grid.size() < 4) throw std::invalid_argument("n-grid needs at least 4 points");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] == 0 || (i > 0 && n_grid[i] <= n_grid[i - 1])) {
            throw std::invalid_argument("n-grid must be positive and strictly increasing");
        }
    }
    if (replicates < 1) throw std::invalid_argument("need at least one replicate");

    const std::size_t n_max = n_grid.back();
    const std::size_t grid_size = n_grid.size();
    const double true_ratio = gen.true_ratio();

    // Per-replicate slot of |R_hat - R|^p at every grid point; the reduction
    // below walks slots in replicate order so parallelism cannot change it.
    std::vector<std::vector<double>> slots(static_cast<std::size_t>(replicates));
    parallel_for(static_cast<std::size_t>(replicates), n_threads, [&](std::size_t rep) {
        PhiloxRng rng(seed, compose_stream(0, rep, 0));
        std::vector<double> u;
        std::vector<double> v;
        gen.generate(n_max, rng, u, v);

        std::vector<double>& errors = slots[rep];
        errors.resize(grid_size);
        double num = 0.0;
        double den = 0.0;
        std::size_t next_idx = 0;
        for (std::size_t i = 0; i < n_max; ++i) {
            num += u[i] * v[i];
            den += u[i];
            while (next_idx < grid_size && i + 1 == n_grid[next_idx]) {
                if (den == 0.0) throw ZeroDenominatorError();
                errors[next_idx] = std::pow(std::abs(num / den - true_ratio), p);
                ++next_idx;
            }
        }
    });

    RateExperimentResult result;
    result.n_grid.assign(n_grid.begin(), n_grid.end());
    result.lp_errors.resize(grid_size);
    for (std::size_t g = 0; g < grid_size; ++g) {
        double total = 0.0;
        for (const auto& errors : slots) total += errors[g];
        result.lp_errors[g] =
            std::pow(total / static_cast<double>(replicates), 1.0 / p);
    }

    // Least-squares slope of log error against log n.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t g = 0; g < grid_size; ++g) {
        const double x = std::log(static_cast<double>(n_grid[g]));
        const double y = std::log(result.lp_errors[g]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double count = static_cast<double>(grid_size);
    result.slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    return result;
}

}  // namespace modacv
