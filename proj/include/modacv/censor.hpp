#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

namespace modacv {

class PhiloxRng;

/// C_i == kappa for every i (kappa in (0, 1]; kappa = 1 is full observation).
struct ConstantCensor {
    double kappa = 1.0;
};

/// Independent 0/1 weights with P[C_i = 1] = p.
struct IidBernoulliCensor {
    double p = 1.0;
};

/// Stationary two-state 0/1 Markov chain with transition probabilities
/// p01 = P[1 | 0] and p10 = P[0 | 1]; started from its stationary law.
struct TwoStateMarkovCensor {
    double p01 = 0.5;
    double p10 = 0.5;

    [[nodiscard]] double stationary_on() const { return p01 / (p01 + p10); }
};

/// Deterministic 0/1 pattern repeated cyclically, with the starting phase
/// drawn uniformly so the weight process is stationary.
struct PeriodicPatternCensor {
    std::vector<int> pattern;
};

using CensorModel =
    std::variant<ConstantCensor, IidBernoulliCensor, TwoStateMarkovCensor, PeriodicPatternCensor>;

/// Throws std::invalid_argument when parameters are out of range.
void validate_censor(const CensorModel& model);

/// E[C_0 * C_lag], lag >= 0.
[[nodiscard]] double censor_nu(const CensorModel& model, long lag);

/// E[C_0 * C_l * C_k * C_m].  Indices may be negative or repeated; the
/// expectation only depends on the gaps between the distinct indices.
[[nodiscard]] double censor_m4(const CensorModel& model, long l, long k, long m);

/// Draws n weights; consumes only the given stream.
[[nodiscard]] std::vector<double> simulate_censor(const CensorModel& model, std::size_t n,
                                                  PhiloxRng& rng);

/// Convenience overload with a fresh stream-0 generator.
[[nodiscard]] std::vector<double> simulate_censor(const CensorModel& model, std::size_t n,
                                                  std::uint64_t seed);

/// Round-trippable text form, e.g. "bernoulli:0.7" or "markov:0.2:0.3".
[[nodiscard]] std::string to_string(const CensorModel& model);

/// Parses "constant:K", "bernoulli:P", "markov:P01:P10" or "pattern:BITS"
/// (BITS a string of 0/1 characters).
[[nodiscard]] CensorModel parse_censor(const std::string& spec);

}  // namespace modacv
