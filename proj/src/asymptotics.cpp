#include "modacv/asymptotics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace modacv {

namespace {

constexpr double kShellTolerance = 1e-8;   // relative last-shell size for "summable"
constexpr long kTruncationCap = 10000;

void validate_decay(const DependenceDecay& d) {
    if (!(d.rate > 0.0)) throw std::invalid_argument("decay rate must be positive");
    if (!(d.constant >= 0.0)) throw std::invalid_argument("decay constant must be non-negative");
}

void check_moment_order(double m) {
    if (!(m > 4.0)) {
        throw std::invalid_argument("moment order must exceed 4, got " + std::to_string(m));
    }
}

double power_law_threshold(DecayKind kind, double m) {
    switch (kind) {
        case DecayKind::Theta:
            return (m - 1.0) / (m - 2.0) * (1.0 + 1.0 / (m - 2.0));
        case DecayKind::Kappa:
            return m / (m - 2.0) * (2.0 + 1.0 / (m - 2.0));
        case DecayKind::Lambda:
            return m / (m - 2.0) * (4.0 + 1.0 / (m - 2.0));
        case DecayKind::AlphaMixing:
            return 1.0 + 1.0 / (m - 4.0);
        case DecayKind::CausalGamma:
            break;
    }
    throw std::invalid_argument("no central-limit rate condition for causal-gamma decays");
}

// Dyadic-block partial summation over i >= 1.  Declares convergence when the
// tail dies out exactly or the last block sums shrink by at least 1e-3 per
// doubling.  Slowly converging series near the boundary may be reported as
// non-convergent; this is the documented behaviour of the heuristic.
bool tail_blocks_shrink(const std::function<double(long)>& term) {
    constexpr int kLevels = 15;  // covers i < 2^15
    std::array<double, kLevels> sums{};
    long lo = 1;
    for (int level = 0; level < kLevels; ++level) {
        const long hi = lo * 2;
        double block = 0.0;
        for (long i = lo; i < hi; ++i) block += std::max(term(i), 0.0);
        if (!std::isfinite(block)) return false;
        sums[static_cast<std::size_t>(level)] = block;
        lo = hi;
    }
    if (sums[kLevels - 1] == 0.0 && sums[kLevels - 2] == 0.0) return true;
    constexpr double kShrink = 1.0 - 1e-3;
    for (int level = kLevels - 3; level < kLevels; ++level) {
        const double prev = sums[static_cast<std::size_t>(level - 1)];
        if (!(prev > 0.0)) return false;
        if (!(sums[static_cast<std::size_t>(level)] < kShrink * prev)) return false;
    }
    return true;
}

double decay_exact_bound(const DependenceDecay& d, long r) {
    return std::max(d.exact(r), 0.0);
}

struct CrossTerms {
    double corrected = 0.0;
    double literal = 0.0;
};

// One k-term of the (co)variance sum.  The literal variant is the printed
// textbook form whose k-sum usually diverges; it is tracked as a diagnostic.
CrossTerms cross_term(const AcvModel& acv, const CensorModel& censor, long li, long lj, long k,
                      double gamma_l_sq, bool want_literal) {
    const double m4 = censor_m4(censor, li, k, k + lj);
    const double kap = acv.kappa4 ? acv.kappa4(li, k, k + lj) : 0.0;
    const double cross_a = acv.gamma(k) * acv.gamma(k + lj - li);
    const double cross_b = acv.gamma(k + lj) * acv.gamma(k - li);
    CrossTerms out;
    out.corrected = m4 * (kap + cross_a + cross_b);
    if (want_literal) out.literal = m4 * (kap + cross_b - gamma_l_sq);
    return out;
}

}  // namespace

const char* to_string(DecayKind kind) noexcept {
    switch (kind) {
        case DecayKind::Theta: return "theta";
        case DecayKind::Kappa: return "kappa";
        case DecayKind::Lambda: return "lambda";
        case DecayKind::AlphaMixing: return "alpha";
        case DecayKind::CausalGamma: return "causal-gamma";
    }
    return "?";
}

double DependenceDecay::bound(long r) const {
    if (r < 1) throw std::invalid_argument("decay bounds are defined for gaps r >= 1");
    if (exact) return exact(r);
    return constant * std::pow(static_cast<double>(r), -rate);
}

DependenceDecay compose_independent(const DependenceDecay& du, const DependenceDecay& dv) {
    if (du.kind != dv.kind) {
        throw std::invalid_argument("cannot compose decays of different kinds");
    }
    validate_decay(du);
    validate_decay(dv);
    if (du.constant == 0.0 && !du.exact) return dv;
    if (dv.constant == 0.0 && !dv.exact) return du;

    DependenceDecay out;
    out.kind = du.kind;
    out.rate = std::min(du.rate, dv.rate);
    out.constant = du.constant + dv.constant;
    if (du.exact || dv.exact) {
        out.exact = [du, dv](long r) { return du.bound(r) + dv.bound(r); };
    }
    return out;
}

DependenceDecay heredity_transform(const DependenceDecay& d, double m, double a) {
    validate_decay(d);
    if (!(a >= 1.0 && a < m)) {
        throw std::invalid_argument("growth order must satisfy 1 <= a < m");
    }
    if (d.kind == DecayKind::AlphaMixing) return d;
    if (d.kind == DecayKind::CausalGamma) {
        throw std::invalid_argument("no heredity transform for causal-gamma decays");
    }

    const double exponent =
        d.kind == DecayKind::Theta ? (m - a) / (m - 1.0) : (m - a) / (m + a - 2.0);
    DependenceDecay out;
    out.kind = d.kind;
    out.rate = d.rate * exponent;
    out.constant = std::pow(d.constant, exponent);
    if (d.exact) {
        out.exact = [exact = d.exact, exponent](long r) {
            return std::pow(std::max(exact(r), 0.0), exponent);
        };
    }
    return out;
}

ConditionCheck clt_condition(DecayKind kind, double rate, double m) {
    check_moment_order(m);
    if (!(rate > 0.0)) throw std::invalid_argument("decay rate must be positive");
    ConditionCheck check;
    check.threshold = power_law_threshold(kind, m);
    check.margin = rate - check.threshold;
    check.pass = rate > check.threshold;
    return check;
}

ConditionCheck clt_condition(const DependenceDecay& decay, double m) {
    if (!decay.exact) return clt_condition(decay.kind, decay.rate, m);
    check_moment_order(m);

    const double threshold = power_law_threshold(decay.kind, m);
    std::function<double(long)> summand;
    switch (decay.kind) {
        case DecayKind::Theta: {
            const double weight = 1.0 / (m - 4.0);
            const double power = (m - 2.0) / (m - 1.0);
            summand = [&decay, weight, power](long i) {
                return std::pow(static_cast<double>(i), weight) *
                       std::pow(decay_exact_bound(decay, i), power);
            };
            break;
        }
        case DecayKind::AlphaMixing: {
            const double weight = 1.0 / (m - 4.0);
            summand = [&decay, weight](long i) {
                return std::pow(static_cast<double>(i), weight) * decay_exact_bound(decay, i);
            };
            break;
        }
        case DecayKind::Kappa:
        case DecayKind::Lambda: {
            // Surrogate sum whose power-law behaviour matches the printed
            // rate inequality: sum_i i^(threshold-1) * coeff(i).
            const double weight = threshold - 1.0;
            summand = [&decay, weight](long i) {
                return std::pow(static_cast<double>(i), weight) * decay_exact_bound(decay, i);
            };
            break;
        }
        case DecayKind::CausalGamma:
            throw std::invalid_argument(
                "no central-limit rate condition for causal-gamma decays");
    }

    ConditionCheck check;
    check.threshold = threshold;
    check.margin = std::numeric_limits<double>::quiet_NaN();
    check.from_exact_sequence = true;
    check.pass = tail_blocks_shrink(summand);
    return check;
}

SllnCheck slln_condition(const DependenceDecay& theta, double r,
                         std::span<const double> delta_grid) {
    if (theta.kind != DecayKind::Theta) {
        throw std::invalid_argument("strong-law check requires a theta decay");
    }
    validate_decay(theta);

    static const std::vector<double> kDefaultGrid = [] {
        std::vector<double> g;
        for (int i = 1; i <= 20; ++i) g.push_back(0.1 * i);
        return g;
    }();
    const std::span<const double> grid =
        delta_grid.empty() ? std::span<const double>(kDefaultGrid) : delta_grid;

    if (theta.constant == 0.0 && !theta.exact) {
        // Zero coefficients: every summand vanishes.
        return {true, grid.front(), std::numeric_limits<double>::infinity()};
    }

    bool any_admissible = false;
    SllnCheck best{false, 0.0, -std::numeric_limits<double>::infinity()};
    for (const double delta : grid) {
        if (!(delta > 0.0)) throw std::invalid_argument("delta grid values must be positive");
        if (!(r > 1.0 + delta)) continue;  // denominator r - (1+delta) must stay positive
        any_admissible = true;
        const double weight_exponent = (r * (delta - 1.0) + 1.0) / (r - (1.0 + delta));
        const double coeff_power = delta / (delta + 1.0);

        if (theta.exact) {
            const auto summand = [&theta, weight_exponent, coeff_power](long i) {
                return std::pow(static_cast<double>(i), weight_exponent) *
                       std::pow(decay_exact_bound(theta, i), coeff_power);
            };
            if (tail_blocks_shrink(summand)) {
                return {true, delta, std::numeric_limits<double>::quiet_NaN()};
            }
        } else {
            // Power-law theta: the series converges iff the combined exponent
            // rate*delta/(delta+1) - weight_exponent exceeds 1.
            const double margin = theta.rate * coeff_power - weight_exponent - 1.0;
            if (margin > best.margin) best = {margin > 0.0, delta, margin};
        }
    }
    if (!any_admissible) {
        throw std::invalid_argument("no admissible delta: need r > 1 + delta for some grid delta");
    }
    if (theta.exact) return {false, 0.0, std::numeric_limits<double>::quiet_NaN()};
    return best;
}

long default_truncation(const AcvModel& acv) {
    if (!acv.gamma) throw std::invalid_argument("autocovariance callback is required");
    const double g0 = std::abs(acv.gamma(0));
    if (g0 == 0.0) return 1;
    for (long k = 1; k < kTruncationCap; ++k) {
        if (std::abs(acv.gamma(k)) < 1e-12 * g0) return k;
    }
    return kTruncationCap;
}

VarianceSum sigma_cross(const AcvModel& acv, const CensorModel& censor, long lag_i, long lag_j,
                        long truncation) {
    if (!acv.gamma) throw std::invalid_argument("autocovariance callback is required");
    if (lag_i < 0 || lag_j < 0) throw std::invalid_argument("lags must be non-negative");
    const long K = truncation > 0 ? truncation : default_truncation(acv);

    const bool want_literal = lag_i == lag_j;
    const double gl = acv.gamma(lag_i);
    const double gamma_l_sq = gl * gl;

    VarianceSum out;
    out.truncation = K;
    out.has_literal = want_literal;

    // Shells (-k, +k) are added as pairs so that evaluating the transposed
    // entry produces bit-identical partial sums.
    const CrossTerms center = cross_term(acv, censor, lag_i, lag_j, 0, gamma_l_sq, want_literal);
    out.value = center.corrected;
    out.literal_value = center.literal;
    double shell_abs = std::abs(center.corrected);
    double literal_shell_abs = std::abs(center.literal);
    for (long k = 1; k <= K; ++k) {
        const CrossTerms neg = cross_term(acv, censor, lag_i, lag_j, -k, gamma_l_sq, want_literal);
        const CrossTerms pos = cross_term(acv, censor, lag_i, lag_j, k, gamma_l_sq, want_literal);
        out.value += neg.corrected + pos.corrected;
        shell_abs = std::abs(neg.corrected) + std::abs(pos.corrected);
        if (want_literal) {
            out.literal_value += neg.literal + pos.literal;
            literal_shell_abs = std::abs(neg.literal) + std::abs(pos.literal);
        }
    }
    out.last_shell = shell_abs;
    out.summable = shell_abs <= kShellTolerance * (1.0 + std::abs(out.value));
    if (want_literal) {
        out.literal_last_shell = literal_shell_abs;
        out.literal_summable =
            literal_shell_abs <= kShellTolerance * (1.0 + std::abs(out.literal_value));
    }
    return out;
}

VarianceSum sigma2(const AcvModel& acv, const CensorModel& censor, long lag, long truncation) {
    return sigma_cross(acv, censor, lag, lag, truncation);
}

std::vector<std::vector<double>> sigma_matrix(const AcvModel& acv, const CensorModel& censor,
                                              std::span<const long> lags, long truncation) {
    if (lags.empty()) throw std::invalid_argument("at least one lag is required");
    for (std::size_t i = 1; i < lags.size(); ++i) {
        if (lags[i] <= lags[i - 1]) {
            throw std::invalid_argument("lags must be strictly increasing");
        }
    }
    const long K = truncation > 0 ? truncation : default_truncation(acv);
    std::vector<std::vector<double>> out(lags.size(), std::vector<double>(lags.size()));
    for (std::size_t i = 0; i < lags.size(); ++i) {
        for (std::size_t j = 0; j < lags.size(); ++j) {
            out[i][j] = sigma_cross(acv, censor, lags[i], lags[j], K).value;
        }
    }
    return out;
}

}  // namespace modacv
