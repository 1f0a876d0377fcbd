#pragma once

#include "modacv/censor.hpp"

#include <functional>
#include <span>
#include <vector>

namespace modacv {

/// Second- and fourth-order structure of the latent process, supplied as
/// callbacks so both analytic models and tabulated values fit.
/// Expected symmetries: gamma(k) == gamma(-k) (evaluate |k| inside the
/// callback so this holds bitwise) and kappa4 invariant under permutations
/// of the index multiset {0, i, j, k}.
struct AcvModel {
    std::function<double(long)> gamma;             ///< lag -> autocovariance
    std::function<double(long, long, long)> kappa4;  ///< joint fourth cumulant
};

enum class DecayKind { Theta, Kappa, Lambda, AlphaMixing, CausalGamma };

[[nodiscard]] const char* to_string(DecayKind kind) noexcept;

/// Decay bound for a weak-dependence coefficient sequence.  The power-law
/// part claims coefficient(r) <= constant * r^(-rate); models with a sharper
/// closed form can attach an exact per-gap generator which then takes
/// precedence in bound().
struct DependenceDecay {
    DecayKind kind = DecayKind::Theta;
    double rate = 1.0;
    double constant = 1.0;
    std::function<double(long)> exact;  ///< optional, r >= 1

    [[nodiscard]] double bound(long r) const;
};

/// Bound for the coefficient of a pair of independent sequences: pointwise
/// sum of the two bounds.  Requires matching kinds.
[[nodiscard]] DependenceDecay compose_independent(const DependenceDecay& du,
                                                  const DependenceDecay& dv);

/// Decay of h(X) for h with growth order a, given E|X|^m < infinity:
/// the rate shrinks by (m-a)/(m-1) for Theta and (m-a)/(m+a-2) for
/// Kappa/Lambda; AlphaMixing survives measurable images unchanged.
[[nodiscard]] DependenceDecay heredity_transform(const DependenceDecay& d, double m, double a);

struct ConditionCheck {
    bool pass = false;
    double threshold = 0.0;
    double margin = 0.0;
    bool from_exact_sequence = false;
};

/// Rate threshold for the central limit theorem under moment order m > 4.
[[nodiscard]] ConditionCheck clt_condition(DecayKind kind, double rate, double m);

/// Same check for a decay object; an attached exact sequence is tested by
/// dyadic-block partial summation instead of the rate inequality.
[[nodiscard]] ConditionCheck clt_condition(const DependenceDecay& decay, double m);

struct SllnCheck {
    bool pass = false;
    double delta = 0.0;   ///< grid point achieving the best margin
    double margin = 0.0;
};

/// Strong-law summability check for a Theta decay, moment order r, searching
/// delta over a grid (default 0.1, 0.2, ..., 2.0; only delta < r - 1 are
/// admissible).
[[nodiscard]] SllnCheck slln_condition(const DependenceDecay& theta, double r,
                                       std::span<const double> delta_grid = {});

/// Truncated doubly-infinite sum for an asymptotic (co)variance, plus
/// truncation diagnostics.  The `literal_*` fields track the uncorrected
/// textbook form of the same sum, which is often non-summable; they are
/// only filled by the single-lag overload.
struct VarianceSum {
    double value = 0.0;
    double last_shell = 0.0;  ///< |term(-K)| + |term(K)|
    long truncation = 0;      ///< K actually used
    bool summable = true;     ///< last shell below tolerance

    double literal_value = 0.0;
    double literal_last_shell = 0.0;
    bool literal_summable = false;
    bool has_literal = false;
};

/// Smallest K with |gamma(K)| < 1e-12 * |gamma(0)|, capped at 10^4.
[[nodiscard]] long default_truncation(const AcvModel& acv);

/// Asymptotic variance of the weight-normalised autocovariance at one lag:
///   sum_k m(l, k, k+l) * [kappa4(l, k, k+l) + gamma(k)^2
///                         + gamma(k+l) * gamma(k-l)]
/// truncated to |k| <= K (K = 0 selects default_truncation).
[[nodiscard]] VarianceSum sigma2(const AcvModel& acv, const CensorModel& censor, long lag,
                                 long truncation = 0);

/// Cross entry for a pair of lags; diagonal calls reproduce sigma2 exactly.
[[nodiscard]] VarianceSum sigma_cross(const AcvModel& acv, const CensorModel& censor, long lag_i,
                                      long lag_j, long truncation = 0);

/// Joint covariance matrix over a set of lags.  Every entry is evaluated
/// independently; the summation order still makes the output exactly
/// symmetric when the callbacks have the symmetries noted on AcvModel.
[[nodiscard]] std::vector<std::vector<double>> sigma_matrix(const AcvModel& acv,
                                                            const CensorModel& censor,
                                                            std::span<const long> lags,
                                                            long truncation = 0);

}  // namespace modacv
