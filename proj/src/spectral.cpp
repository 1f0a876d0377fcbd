#include "modacv/spectral.hpp"

#include "modacv/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace modacv {

namespace {

void check_sobolev_index(double s) {
    if (!(s > 1.0)) throw std::invalid_argument("smoothness index must exceed 1");
}

}  // namespace

SpectralFunctional::SpectralFunctional(std::map<long, double> coeffs, double sobolev_index)
    : coeffs_(std::move(coeffs)), s_(sobolev_index) {
    check_sobolev_index(s_);
    for (const auto& [lag, value] : coeffs_) {
        if (lag < 0) {
            throw std::invalid_argument(
                "coefficients are stored for lags >= 0 and mirrored; negative key " +
                std::to_string(lag));
        }
        if (!std::isfinite(value)) {
            throw std::invalid_argument("non-finite coefficient at lag " + std::to_string(lag));
        }
        if (value != 0.0) max_lag_ = std::max(max_lag_, lag);
    }
}

double SpectralFunctional::coeff(long l) const {
    const auto it = coeffs_.find(std::labs(l));
    return it == coeffs_.end() ? 0.0 : it->second;
}

double SpectralFunctional::operator()(double x) const {
    double total = coeff(0);
    for (const auto& [lag, value] : coeffs_) {
        if (lag > 0) total += 2.0 * value * std::cos(static_cast<double>(lag) * x);
    }
    return total;
}

SpectralFunctional SpectralFunctional::parse(const std::string& spec, double sobolev_index) {
    std::map<long, double> coeffs;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const std::size_t colon = item.find(':');
        if (colon == std::string::npos) {
            throw std::invalid_argument("functional term '" + item + "' must be LAG:VALUE");
        }
        try {
            std::size_t used = 0;
            const long lag = std::stol(item.substr(0, colon), &used);
            if (used != colon) throw std::invalid_argument(item);
            const std::string value_text = item.substr(colon + 1);
            const double value = std::stod(value_text, &used);
            if (used != value_text.size()) throw std::invalid_argument(item);
            coeffs[lag] += value;
        } catch (const std::invalid_argument&) {
            throw std::invalid_argument("cannot parse functional term '" + item + "'");
        }
    }
    if (coeffs.empty()) throw std::invalid_argument("functional spec is empty");
    return {std::move(coeffs), sobolev_index};
}

double sobolev_norm(const SpectralFunctional& g) {
    double total = 0.0;
    for (const auto& [lag, value] : g.coeffs()) {
        const double weight = std::pow(1.0 + static_cast<double>(lag), g.sobolev_index());
        total += (lag == 0 ? 1.0 : 2.0) * weight * value * value;
    }
    return std::sqrt(total);
}

double dual_error(const std::map<long, double>& discrepancies, double s) {
    check_sobolev_index(s);
    double total = 0.0;
    for (const auto& [lag, d] : discrepancies) {
        if (lag < 0) {
            throw std::invalid_argument("discrepancies are keyed by lag >= 0 and mirrored");
        }
        const double weight = std::pow(1.0 + static_cast<double>(lag), -s);
        total += (lag == 0 ? 1.0 : 2.0) * weight * d * d;
    }
    return std::sqrt(total);
}

double spectral_sum(std::span<const double> acv, double freq) {
    if (acv.empty()) throw std::invalid_argument("need at least the lag-0 autocovariance");
    double total = acv[0];
    for (std::size_t l = 1; l < acv.size(); ++l) {
        total += 2.0 * acv[l] * std::cos(static_cast<double>(l) * freq);
    }
    return total;
}

PeriodogramResult modified_periodogram(const ModulatedSeries& series,
                                       std::span<const double> freq_grid, std::size_t max_lag,
                                       MeanMode mode) {
    if (max_lag >= series.size()) {
        throw std::invalid_argument("truncation lag must be below the series length");
    }
    for (const double x : freq_grid) {
        if (!(std::abs(x) <= std::numbers::pi + 1e-9)) {
            throw std::invalid_argument("frequencies must lie in [-pi, pi]");
        }
    }

    const std::vector<AcvEstimate> profile = acv_profile(series, max_lag, mode);
    std::vector<double> acv(max_lag + 1, 0.0);
    PeriodogramResult out;
    for (const AcvEstimate& est : profile) {
        if (est.zero_overlap) {
            out.flagged_lags.push_back(est.lag);
        } else {
            acv[est.lag] = est.gamma_tilde;
        }
    }
    out.values.reserve(freq_grid.size());
    for (const double x : freq_grid) out.values.push_back(spectral_sum(acv, x));
    return out;
}

FunctionalEstimate integrated_functional(const ModulatedSeries& series,
                                         const SpectralFunctional& g, std::size_t max_lag,
                                         MeanMode mode) {
    if (static_cast<std::size_t>(g.max_lag()) > max_lag) {
        throw std::invalid_argument("functional support exceeds the truncation lag");
    }
    if (static_cast<std::size_t>(g.max_lag()) >= series.size()) {
        throw std::invalid_argument("functional support exceeds the series length");
    }

    const std::vector<AcvEstimate> profile =
        acv_profile(series, static_cast<std::size_t>(g.max_lag()), mode);
    FunctionalEstimate out;
    for (const AcvEstimate& est : profile) {
        const double weight = g.coeff(static_cast<long>(est.lag));
        if (weight == 0.0) continue;
        if (est.zero_overlap) {
            out.flagged_lags.push_back(est.lag);
            continue;
        }
        out.value += (est.lag == 0 ? 1.0 : 2.0) * weight * est.gamma_tilde;
    }
    return out;
}

std::size_t default_periodogram_lag(std::size_t n) noexcept {
    return static_cast<std::size_t>(std::cbrt(static_cast<double>(n)));
}

SpectralConvergenceResult spectral_convergence_experiment(
    const ProcessModel& process, const CensorModel& censor, const SpectralFunctional& g,
    std::span<const std::size_t> n_grid, int replicates, std::uint64_t seed, int n_threads,
    std::size_t burnin) {
    const std::optional<AcvModel> acv = analytic_gamma(process);
    if (!acv) {
        throw std::invalid_argument(
            "experiment requires a model with a closed-form autocovariance");
    }
    if (n_grid.size() < 2) throw std::invalid_argument("n-grid needs at least 2 points");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] <= static_cast<std::size_t>(g.max_lag()) ||
            (i > 0 && n_grid[i] <= n_grid[i - 1])) {
            throw std::invalid_argument(
                "n-grid must be strictly increasing and exceed the functional support");
        }
    }
    if (replicates < 1) throw std::invalid_argument("need at least one replicate");

    const long top_lag = g.max_lag();
    std::vector<double> exact(static_cast<std::size_t>(top_lag) + 1);
    for (long l = 0; l <= top_lag; ++l) exact[static_cast<std::size_t>(l)] = acv->gamma(l);

    SpectralConvergenceResult result;
    result.n_grid.assign(n_grid.begin(), n_grid.end());
    result.mean_sq_dual_error.resize(n_grid.size());
    result.functional_discrepancies.resize(n_grid.size());

    for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
        const std::size_t n = n_grid[gi];
        std::vector<double> slot(static_cast<std::size_t>(replicates));
        std::vector<double> func_slot(static_cast<std::size_t>(replicates));
        parallel_for(static_cast<std::size_t>(replicates), n_threads, [&](std::size_t rep) {
            PhiloxRng xs(seed, compose_stream(gi, rep, 0));
            PhiloxRng cs(seed, compose_stream(gi, rep, 1));
            const std::vector<double> x = simulate(process, n, xs, burnin);
            const std::vector<double> c = simulate_censor(censor, n, cs);
            const ModulatedSeries series = modulate(x, c);

            // Squared dual-norm discrepancy over the support lags of g;
            // lags without co-observed pairs contribute the full gamma.
            // The same per-lag errors also give the integrated-functional
            // discrepancy, scaled here to the CLT magnitude.
            const auto profile =
                acv_profile(series, static_cast<std::size_t>(top_lag), MeanMode::None);
            double total = 0.0;
            double func = 0.0;
            for (long l = 0; l <= top_lag; ++l) {
                const AcvEstimate& est = profile[static_cast<std::size_t>(l)];
                const double estimate = est.zero_overlap ? 0.0 : est.gamma_tilde;
                const double d = estimate - exact[static_cast<std::size_t>(l)];
                const double weight =
                    std::pow(1.0 + static_cast<double>(l), -g.sobolev_index());
                const double mirror = (l == 0 ? 1.0 : 2.0);
                total += mirror * weight * d * d;
                func += mirror * g.coeff(l) * d;
            }
            slot[rep] = total;
            func_slot[rep] = std::sqrt(static_cast<double>(n)) * func;
        });
        double total = 0.0;
        for (const double v : slot) total += v;
        result.mean_sq_dual_error[gi] = total / static_cast<double>(replicates);
        result.functional_discrepancies[gi] = std::move(func_slot);
    }

    result.strictly_decreasing = true;
    for (std::size_t i = 1; i < result.mean_sq_dual_error.size(); ++i) {
        if (!(result.mean_sq_dual_error[i] < result.mean_sq_dual_error[i - 1])) {
            result.strictly_decreasing = false;
        }
    }

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < result.n_grid.size(); ++i) {
        const double x = std::log(static_cast<double>(result.n_grid[i]));
        const double y = std::log(result.mean_sq_dual_error[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double count = static_cast<double>(result.n_grid.size());
    result.slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    return result;
}

}  // namespace modacv
