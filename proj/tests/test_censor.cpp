#include "modacv/censor.hpp"

#include "modacv/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace modacv {
namespace {

TEST(CensorMoments, ConstantWeights) {
    const CensorModel model = ConstantCensor{0.5};
    EXPECT_DOUBLE_EQ(censor_nu(model, 0), 0.25);
    EXPECT_DOUBLE_EQ(censor_nu(model, 7), 0.25);
    EXPECT_DOUBLE_EQ(censor_m4(model, 1, 2, 3), 0.0625);
    EXPECT_DOUBLE_EQ(censor_m4(model, 0, 0, 0), 0.0625);
}

TEST(CensorMoments, BernoulliCountsDistinctIndices) {
    const double p = 0.7;
    const CensorModel model = IidBernoulliCensor{p};
    EXPECT_DOUBLE_EQ(censor_nu(model, 0), p);
    EXPECT_DOUBLE_EQ(censor_nu(model, 1), p * p);
    EXPECT_DOUBLE_EQ(censor_nu(model, 10), p * p);
    // 0/1 weights are idempotent, so only distinct indices contribute.
    EXPECT_DOUBLE_EQ(censor_m4(model, 0, 0, 0), p);
    EXPECT_DOUBLE_EQ(censor_m4(model, 1, 0, 1), p * p);
    EXPECT_DOUBLE_EQ(censor_m4(model, 1, 2, 2), p * p * p);
    EXPECT_DOUBLE_EQ(censor_m4(model, 1, 2, 3), p * p * p * p);
}

TEST(CensorMoments, TwoStateMarkovChain) {
    const TwoStateMarkovCensor chain{0.2, 0.3};
    const CensorModel model = chain;
    EXPECT_DOUBLE_EQ(chain.stationary_on(), 0.4);
    EXPECT_NEAR(censor_nu(model, 0), 0.4, 1e-15);
    EXPECT_NEAR(censor_nu(model, 1), 0.28, 1e-15);
    EXPECT_NEAR(censor_nu(model, 2), 0.22, 1e-15);
    // Gap products: pi1 * prod (P^gap)_{11} over consecutive distinct offsets.
    EXPECT_NEAR(censor_m4(model, 1, 3, 4), 0.1078, 1e-15);
    EXPECT_NEAR(censor_m4(model, 1, 0, 1), 0.28, 1e-15);
    EXPECT_NEAR(censor_m4(model, 2, 5, 7), 0.057475, 1e-15);
    // Long lags decay towards independence: nu(lag) -> pi1^2.
    EXPECT_NEAR(censor_nu(model, 200), 0.16, 1e-12);
}

TEST(CensorMoments, PeriodicPattern) {
    const CensorModel model = parse_censor("pattern:110");
    EXPECT_DOUBLE_EQ(censor_nu(model, 0), 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(censor_nu(model, 1), 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(censor_nu(model, 3), 2.0 / 3.0);  // period repeats
    EXPECT_DOUBLE_EQ(censor_m4(model, 1, 0, 1), 1.0 / 3.0);
    // Offsets {0,1,2,3} hit the off bit in every phase of "110".
    EXPECT_DOUBLE_EQ(censor_m4(model, 1, 2, 3), 0.0);
    // Alternating pattern: odd lags never co-observe.
    const CensorModel alt = parse_censor("pattern:10");
    EXPECT_DOUBLE_EQ(censor_nu(alt, 1), 0.0);
    EXPECT_DOUBLE_EQ(censor_nu(alt, 2), 0.5);
}

TEST(CensorMoments, FourthMomentIsPermutationInvariant) {
    const std::vector<CensorModel> models = {
        CensorModel(IidBernoulliCensor{0.6}),
        CensorModel(TwoStateMarkovCensor{0.2, 0.3}),
        CensorModel(parse_censor("pattern:1101001")),
    };
    PhiloxRng rng(0x5EEDu, 0);
    for (int trial = 0; trial < 1000; ++trial) {
        std::array<long, 3> idx;
        for (long& v : idx) {
            v = static_cast<long>(rng.next_u32() % 21) - 10;  // in [-10, 10]
        }
        for (const CensorModel& model : models) {
            const double base = censor_m4(model, idx[0], idx[1], idx[2]);
            std::array<long, 3> perm = idx;
            std::sort(perm.begin(), perm.end());
            do {
                EXPECT_EQ(censor_m4(model, perm[0], perm[1], perm[2]), base);
            } while (std::next_permutation(perm.begin(), perm.end()));
        }
    }
}

TEST(CensorMoments, NegativeIndicesShiftToGaps) {
    const CensorModel model = TwoStateMarkovCensor{0.2, 0.3};
    // {0,-1,2,3} has the same gap structure as {0,1,3,4}.
    EXPECT_EQ(censor_m4(model, -1, 2, 3), censor_m4(model, 1, 3, 4));
    EXPECT_THROW(censor_nu(model, -1), std::invalid_argument);
}

TEST(CensorValidation, RejectsOutOfRangeParameters) {
    EXPECT_THROW(validate_censor(ConstantCensor{0.0}), std::invalid_argument);
    EXPECT_THROW(validate_censor(ConstantCensor{1.5}), std::invalid_argument);
    EXPECT_NO_THROW(validate_censor(ConstantCensor{1.0}));
    EXPECT_THROW(validate_censor(IidBernoulliCensor{0.0}), std::invalid_argument);
    EXPECT_NO_THROW(validate_censor(IidBernoulliCensor{1.0}));
    EXPECT_THROW(validate_censor(TwoStateMarkovCensor{0.0, 0.5}), std::invalid_argument);
    EXPECT_THROW(validate_censor(TwoStateMarkovCensor{0.5, 1.0}), std::invalid_argument);
    EXPECT_THROW(validate_censor(PeriodicPatternCensor{{}}), std::invalid_argument);
    EXPECT_THROW(validate_censor(PeriodicPatternCensor{{1, 2}}), std::invalid_argument);
    EXPECT_NO_THROW(validate_censor(PeriodicPatternCensor{{0, 0}}));  // all-off is legal
}

TEST(CensorParsing, RoundTrips) {
    for (const std::string spec :
         {"constant:0.5", "bernoulli:0.7", "markov:0.2:0.3", "pattern:1101"}) {
        const CensorModel model = parse_censor(spec);
        EXPECT_EQ(to_string(parse_censor(to_string(model))), to_string(model));
    }
    EXPECT_EQ(to_string(parse_censor("constant:1")), "constant:1");
    EXPECT_EQ(to_string(parse_censor("pattern:10")), "pattern:10");
}

TEST(CensorParsing, RejectsMalformedSpecs) {
    EXPECT_THROW(parse_censor(""), std::invalid_argument);
    EXPECT_THROW(parse_censor("bernoulli"), std::invalid_argument);
    EXPECT_THROW(parse_censor("bernoulli:abc"), std::invalid_argument);
    EXPECT_THROW(parse_censor("bernoulli:1.5"), std::invalid_argument);
    EXPECT_THROW(parse_censor("markov:0.2"), std::invalid_argument);
    EXPECT_THROW(parse_censor("markov:0:0.5"), std::invalid_argument);
    EXPECT_THROW(parse_censor("pattern:"), std::invalid_argument);
    EXPECT_THROW(parse_censor("pattern:102"), std::invalid_argument);
    EXPECT_THROW(parse_censor("gamma:0.5"), std::invalid_argument);
    EXPECT_THROW(parse_censor("constant:0.5:0.5"), std::invalid_argument);
}

TEST(CensorSimulation, ConstantFillsValue) {
    PhiloxRng rng(1, 0);
    const auto c = simulate_censor(ConstantCensor{0.25}, 64, rng);
    ASSERT_EQ(c.size(), 64u);
    for (const double v : c) EXPECT_EQ(v, 0.25);
}

TEST(CensorSimulation, BernoulliMatchesProbability) {
    PhiloxRng rng(2, 0);
    const auto c = simulate_censor(IidBernoulliCensor{0.7}, 100000, rng);
    double on = 0.0;
    for (const double v : c) {
        ASSERT_TRUE(v == 0.0 || v == 1.0);
        on += v;
    }
    EXPECT_NEAR(on / static_cast<double>(c.size()), 0.7, 0.01);
}

TEST(CensorSimulation, MarkovMatchesStationaryMoments) {
    PhiloxRng rng(3, 0);
    const auto c = simulate_censor(TwoStateMarkovCensor{0.2, 0.3}, 200000, rng);
    double on = 0.0, pairs = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        on += c[i];
        if (i + 1 < c.size()) pairs += c[i] * c[i + 1];
    }
    EXPECT_NEAR(on / static_cast<double>(c.size()), 0.4, 0.01);
    EXPECT_NEAR(pairs / static_cast<double>(c.size() - 1), 0.28, 0.01);
}

TEST(CensorSimulation, PatternRepeatsWithRandomPhase) {
    const CensorModel model = parse_censor("pattern:110");
    bool phase_seen[3] = {false, false, false};
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto c = simulate_censor(model, 30, seed);
        for (std::size_t i = 0; i + 3 < c.size(); ++i) EXPECT_EQ(c[i], c[i + 3]);
        // Identify the phase from the first window.
        const std::array<double, 3> head = {c[0], c[1], c[2]};
        if (head == std::array<double, 3>{1, 1, 0}) phase_seen[0] = true;
        if (head == std::array<double, 3>{1, 0, 1}) phase_seen[1] = true;
        if (head == std::array<double, 3>{0, 1, 1}) phase_seen[2] = true;
    }
    EXPECT_TRUE(phase_seen[0] && phase_seen[1] && phase_seen[2]);
}

TEST(CensorSimulation, SeedOverloadUsesWeightStream) {
    const CensorModel model = IidBernoulliCensor{0.5};
    const auto via_seed = simulate_censor(model, 256, std::uint64_t{42});
    PhiloxRng rng(42, compose_stream(0, 0, 1));
    const auto via_stream = simulate_censor(model, 256, rng);
    EXPECT_EQ(via_seed, via_stream);
}

TEST(CensorSimulation, RejectsEmptyRequest) {
    PhiloxRng rng(1, 0);
    EXPECT_THROW(simulate_censor(ConstantCensor{1.0}, 0, rng), std::invalid_argument);
}

}  // namespace
}  // namespace modacv
