#pragma once

#include "modacv/asymptotics.hpp"
#include "modacv/rng.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace modacv {

/// Innovation distribution with closed-form absolute and even moments.
struct Innovation {
    enum class Kind { Gaussian, Uniform, Bernoulli, Rademacher };

    Kind kind = Kind::Gaussian;
    double sigma = 1.0;  ///< Gaussian scale
    double lo = -1.0;    ///< Uniform support
    double hi = 1.0;
    double prob = 0.5;   ///< Bernoulli P[eps = 1]

    static Innovation gaussian(double sigma = 1.0);
    static Innovation uniform(double lo, double hi);
    static Innovation bernoulli(double prob);
    static Innovation rademacher();

    [[nodiscard]] double mean() const;
    [[nodiscard]] double mean_abs() const;
    [[nodiscard]] double second_moment() const;
    [[nodiscard]] double fourth_moment() const;
    [[nodiscard]] double sample(PhiloxRng& rng) const;
};

/// X_t = phi * X_{t-1} + eps_t, |phi| < 1.
struct Ar1Model {
    double phi = 0.5;
    Innovation innov;
};

/// X_t = c_r * sin(X_{t-1}) + eps_t; the sine family has Lipschitz
/// constant c_r by construction.
struct NparModel {
    double c_r = 0.5;
    Innovation innov;
};

/// X_t = (s0 + c_s * |X_{t-1}|) * eps_t with standardized innovations
/// (E eps^2 = 1) and s0 > 0 keeping the scale positive.
struct ArchModel {
    double s0 = 0.5;
    double c_s = 0.5;
    Innovation innov;
};

/// X_t = c_r * sin(X_{t-1}) + (s0 + c_s * |X_{t-1}|) * eps_t, c_r + c_s < 1.
struct ArArchModel {
    double c_r = 0.25;
    double s0 = 0.5;
    double c_s = 0.25;
    Innovation innov;
};

/// X_t = a * X_{t-1} + b * X_{t-1} * eps_{t-1} + eps_t, stationary when
/// c = E|a + b*eps| < 1.
struct BilinearModel {
    double a = 0.25;
    double b = 0.25;
    Innovation innov;
};

using ProcessModel = std::variant<Ar1Model, NparModel, ArchModel, ArArchModel, BilinearModel>;

/// Throws std::invalid_argument when the stationarity conditions or
/// innovation parameters fail.
void validate_process(const ProcessModel& model);

/// The forgetting constant c of the recursion (|phi|, c_r, c_s, c_r + c_s,
/// or E|a + b*eps| for the bilinear model, computed in closed form).
[[nodiscard]] double contraction(const ProcessModel& model);

/// Runs the recursion from X_0 = 0, discards `burnin` steps, returns n values.
[[nodiscard]] std::vector<double> simulate(const ProcessModel& model, std::size_t n,
                                           PhiloxRng& rng, std::size_t burnin = 1000);

/// Deterministic convenience wrapper on a fresh stream-0 generator.
[[nodiscard]] std::vector<double> simulate(const ProcessModel& model, std::size_t n,
                                           std::uint64_t seed, std::size_t burnin = 1000);

/// E|X_0| under the stationary law: exact for Gaussian AR(1), otherwise
/// estimated once from a long fixed-seed run and cached per model.
[[nodiscard]] double mean_abs_x0(const ProcessModel& model);

/// Geometric dependence-coefficient bound at gap r >= 1:
/// c^r * E|X_0| for the Markov recursions, c^r * (r+1) / (1-c) for the
/// bilinear model.  `mean_abs` overrides the E|X_0| factor when supplied.
[[nodiscard]] double theta_bound(const ProcessModel& model, long r,
                                 std::optional<double> mean_abs = {});

/// The same bound packaged as a decay object (exact generator attached,
/// plus a crude power-law envelope of nominal rate 2 for code paths that
/// ignore exact sequences).
[[nodiscard]] DependenceDecay theta_decay(const ProcessModel& model,
                                          std::optional<double> mean_abs = {});

/// Exact second-order structure where a closed form exists: Gaussian AR(1)
/// gives gamma(k) = sigma^2 * phi^|k| / (1 - phi^2) and kappa4 == 0.
/// Everything else returns nullopt.
[[nodiscard]] std::optional<AcvModel> analytic_gamma(const ProcessModel& model);

[[nodiscard]] std::string to_string(const Innovation& innov);
[[nodiscard]] std::string to_string(const ProcessModel& model);

/// Parses "gaussian:S", "uniform:LO:HI", "bernoulli:P" or "rademacher".
[[nodiscard]] Innovation parse_innovation(const std::string& spec);

/// Parses "ar1:PHI:INNOV", "npar:CR:INNOV", "arch:S0:CS:INNOV",
/// "ararch:CR:S0:CS:INNOV" or "bilinear:A:B:INNOV" where INNOV is an
/// innovation spec as above.
[[nodiscard]] ProcessModel parse_process(const std::string& spec);

}  // namespace modacv
