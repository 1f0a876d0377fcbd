#include "modacv/censor.hpp"

#include "modacv/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace modacv {

namespace {

// (P^n)_{11} for the two-state chain, by squaring.  Equivalent to the
// spectral form pi1 + pi0 * (1 - p01 - p10)^n but avoids cancellation for
// eigenvalues near -1 and is exact for n = 0.
double on_on_probability(const TwoStateMarkovCensor& c, long n) {
    using Mat = std::array<double, 4>;  // row-major 2x2
    const auto mul = [](const Mat& a, const Mat& b) -> Mat {
        return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
                a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
    };
    Mat result = {1.0, 0.0, 0.0, 1.0};
    Mat base = {1.0 - c.p01, c.p01, c.p10, 1.0 - c.p10};
    for (unsigned long k = static_cast<unsigned long>(n); k != 0; k >>= 1) {
        if (k & 1ul) result = mul(result, base);
        base = mul(base, base);
    }
    return result[3];
}

// Sorted distinct offsets of {0, l, k, m}, shifted so the smallest is 0.
// Stationarity makes the expectation depend on these gaps only.
std::vector<long> normalised_offsets(long l, long k, long m) {
    std::vector<long> idx = {0, l, k, m};
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    const long base = idx.front();
    for (long& t : idx) t -= base;
    return idx;
}

long positive_mod(long value, long period) {
    const long r = value % period;
    return r < 0 ? r + period : r;
}

// Uniform integer in [0, bound) by rejection, exactly unbiased.
std::uint32_t uniform_below(PhiloxRng& rng, std::uint32_t bound) {
    const std::uint32_t limit = 0xFFFFFFFFu - 0xFFFFFFFFu % bound;
    std::uint32_t draw;
    do {
        draw = rng.next_u32();
    } while (draw >= limit);
    return draw % bound;
}

struct NuVisitor {
    long lag;

    double operator()(const ConstantCensor& c) const { return c.kappa * c.kappa; }

    double operator()(const IidBernoulliCensor& c) const { return lag == 0 ? c.p : c.p * c.p; }

    double operator()(const TwoStateMarkovCensor& c) const {
        return c.stationary_on() * on_on_probability(c, lag);
    }

    double operator()(const PeriodicPatternCensor& c) const {
        const long period = static_cast<long>(c.pattern.size());
        double total = 0.0;
        for (long j = 0; j < period; ++j) {
            total += static_cast<double>(c.pattern[static_cast<std::size_t>(j)] *
                                         c.pattern[static_cast<std::size_t>((j + lag) % period)]);
        }
        return total / static_cast<double>(period);
    }
};

struct M4Visitor {
    const std::vector<long>& offsets;

    double operator()(const ConstantCensor& c) const {
        return c.kappa * c.kappa * c.kappa * c.kappa;
    }

    double operator()(const IidBernoulliCensor& c) const {
        // C_i^2 == C_i for 0/1 weights, so only distinct indices count.
        double prod = 1.0;
        for (std::size_t i = 0; i < offsets.size(); ++i) prod *= c.p;
        return prod;
    }

    double operator()(const TwoStateMarkovCensor& c) const {
        double prob = c.stationary_on();
        for (std::size_t i = 1; i < offsets.size(); ++i) {
            prob *= on_on_probability(c, offsets[i] - offsets[i - 1]);
        }
        return prob;
    }

    double operator()(const PeriodicPatternCensor& c) const {
        const long period = static_cast<long>(c.pattern.size());
        double total = 0.0;
        for (long j = 0; j < period; ++j) {
            double prod = 1.0;
            for (const long t : offsets) {
                prod *= static_cast<double>(
                    c.pattern[static_cast<std::size_t>(positive_mod(j + t, period))]);
            }
            total += prod;
        }
        return total / static_cast<double>(period);
    }
};

struct SimulateVisitor {
    std::size_t n;
    PhiloxRng& rng;

    std::vector<double> operator()(const ConstantCensor& c) const {
        return std::vector<double>(n, c.kappa);
    }

    std::vector<double> operator()(const IidBernoulliCensor& c) const {
        std::vector<double> out(n);
        for (double& v : out) v = rng.uniform01() < c.p ? 1.0 : 0.0;
        return out;
    }

    std::vector<double> operator()(const TwoStateMarkovCensor& c) const {
        std::vector<double> out(n);
        int state = rng.uniform01() < c.stationary_on() ? 1 : 0;
        out[0] = state;
        for (std::size_t i = 1; i < n; ++i) {
            const double u = rng.uniform01();
            state = state == 1 ? (u < c.p10 ? 0 : 1) : (u < c.p01 ? 1 : 0);
            out[i] = state;
        }
        return out;
    }

    std::vector<double> operator()(const PeriodicPatternCensor& c) const {
        const auto period = static_cast<std::uint32_t>(c.pattern.size());
        const std::uint32_t phase = uniform_below(rng, period);
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = static_cast<double>(c.pattern[(phase + i) % period]);
        }
        return out;
    }
};

}  // namespace

void validate_censor(const CensorModel& model) {
    std::visit(
        [](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, ConstantCensor>) {
                if (!(c.kappa > 0.0 && c.kappa <= 1.0)) {
                    throw std::invalid_argument("constant weight must lie in (0, 1]");
                }
            } else if constexpr (std::is_same_v<T, IidBernoulliCensor>) {
                if (!(c.p > 0.0 && c.p <= 1.0)) {
                    throw std::invalid_argument("observation probability must lie in (0, 1]");
                }
            } else if constexpr (std::is_same_v<T, TwoStateMarkovCensor>) {
                if (!(c.p01 > 0.0 && c.p01 < 1.0 && c.p10 > 0.0 && c.p10 < 1.0)) {
                    throw std::invalid_argument(
                        "transition probabilities must lie strictly in (0, 1)");
                }
            } else {
                if (c.pattern.empty()) throw std::invalid_argument("pattern must be non-empty");
                for (const int b : c.pattern) {
                    if (b != 0 && b != 1) {
                        throw std::invalid_argument("pattern entries must be 0 or 1");
                    }
                }
            }
        },
        model);
}

double censor_nu(const CensorModel& model, long lag) {
    if (lag < 0) throw std::invalid_argument("lag must be non-negative");
    validate_censor(model);
    return std::visit(NuVisitor{lag}, model);
}

double censor_m4(const CensorModel& model, long l, long k, long m) {
    validate_censor(model);
    const std::vector<long> offsets = normalised_offsets(l, k, m);
    return std::visit(M4Visitor{offsets}, model);
}

std::vector<double> simulate_censor(const CensorModel& model, std::size_t n, PhiloxRng& rng) {
    if (n == 0) throw std::invalid_argument("cannot simulate an empty weight sequence");
    validate_censor(model);
    return std::visit(SimulateVisitor{n, rng}, model);
}

std::vector<double> simulate_censor(const CensorModel& model, std::size_t n, std::uint64_t seed) {
    PhiloxRng rng(seed, compose_stream(0, 0, 1));
    return simulate_censor(model, n, rng);
}

std::string to_string(const CensorModel& model) {
    char buf[96];
    return std::visit(
        [&buf](const auto& c) -> std::string {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, ConstantCensor>) {
                std::snprintf(buf, sizeof buf, "constant:%.17g", c.kappa);
                return buf;
            } else if constexpr (std::is_same_v<T, IidBernoulliCensor>) {
                std::snprintf(buf, sizeof buf, "bernoulli:%.17g", c.p);
                return buf;
            } else if constexpr (std::is_same_v<T, TwoStateMarkovCensor>) {
                std::snprintf(buf, sizeof buf, "markov:%.17g:%.17g", c.p01, c.p10);
                return buf;
            } else {
                std::string out = "pattern:";
                for (const int b : c.pattern) out += b == 0 ? '0' : '1';
                return out;
            }
        },
        model);
}

CensorModel parse_censor(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.empty()) throw std::invalid_argument("empty censor spec");

    const auto number = [&](std::size_t i) {
        try {
            std::size_t used = 0;
            const double v = std::stod(parts.at(i), &used);
            if (used != parts[i].size()) throw std::invalid_argument(parts[i]);
            return v;
        } catch (const std::exception&) {
            throw std::invalid_argument("bad numeric field '" + parts[i] + "' in censor spec '" +
                                        spec + "'");
        }
    };
    const auto expect_fields = [&](std::size_t n) {
        if (parts.size() != n) {
            throw std::invalid_argument("censor spec '" + spec + "' expects " +
                                        std::to_string(n - 1) + " parameter(s)");
        }
    };

    CensorModel model;
    if (parts[0] == "constant") {
        expect_fields(2);
        model = ConstantCensor{number(1)};
    } else if (parts[0] == "bernoulli") {
        expect_fields(2);
        model = IidBernoulliCensor{number(1)};
    } else if (parts[0] == "markov") {
        expect_fields(3);
        model = TwoStateMarkovCensor{number(1), number(2)};
    } else if (parts[0] == "pattern") {
        expect_fields(2);
        PeriodicPatternCensor pat;
        for (const char ch : parts[1]) {
            if (ch != '0' && ch != '1') {
                throw std::invalid_argument("pattern bits must be 0/1 in '" + spec + "'");
            }
            pat.pattern.push_back(ch - '0');
        }
        model = pat;
    } else {
        throw std::invalid_argument("unknown censor model '" + parts[0] + "'");
    }
    validate_censor(model);
    return model;
}

}  // namespace modacv
