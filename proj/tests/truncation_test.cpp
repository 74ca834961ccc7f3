#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "stocsf/dynamics.hpp"
#include "stocsf/flow.hpp"
#include "stocsf/truncation.hpp"
#include "test_support.hpp"

using namespace stocsf;

namespace {

// Mixture of tiny, moderate and large magnitudes so both branches are hit.
double random_value(std::mt19937_64& eng) {
    std::uniform_int_distribution<int> scale(-4, 3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    return u(eng) * std::pow(10.0, scale(eng));
}

}  // namespace

TEST(Cutoff, Examples) {
    EXPECT_DOUBLE_EQ(cutoff(TruncationLevel(10), 0.05), 0.1);
    EXPECT_DOUBLE_EQ(cutoff(TruncationLevel(10), 5.0), 5.0);
    EXPECT_DOUBLE_EQ(cutoff(TruncationLevel(10), -0.05), -0.1);
    EXPECT_DOUBLE_EQ(cutoff(TruncationLevel(10), 0.1), 0.1);
    EXPECT_DOUBLE_EQ(cutoff(TruncationLevel(10), 0.0), 0.1);
    EXPECT_DOUBLE_EQ(cutoff(TruncationLevel(1), -0.3), -1.0);
}

TEST(Cutoff, RejectsLevelBelowOne) {
    EXPECT_THROW(TruncationLevel(0), InvalidInput);
    EXPECT_THROW(TruncationLevel(-3), InvalidInput);
}

TEST(Cutoff, LinearGrowth) {
    std::mt19937_64 eng(2024);
    for (int n : {1, 2, 10, 100}) {
        const TruncationLevel level(n);
        for (int i = 0; i < 10000; ++i) {
            const double M = random_value(eng);
            ASSERT_LE(std::abs(cutoff(level, M)), 1.0 + std::abs(M)) << "n=" << n << " M=" << M;
        }
    }
}

TEST(Cutoff, LipschitzOnEachHalfLine) {
    // Lengths are positive, so pairs are drawn with a common sign.
    std::mt19937_64 eng(7);
    for (int n : {1, 2, 10, 100}) {
        const TruncationLevel level(n);
        for (int i = 0; i < 10000; ++i) {
            const double a = std::abs(random_value(eng));
            const double b = std::abs(random_value(eng));
            const double sign = (i % 2 == 0) ? 1.0 : -1.0;
            const double M1 = sign * a, M2 = sign * b;
            ASSERT_LE(std::abs(cutoff(level, M1) - cutoff(level, M2)), std::abs(M1 - M2) + 1e-15)
                << "n=" << n << " M1=" << M1 << " M2=" << M2;
        }
    }
}

TEST(Cutoff, JumpAcrossZeroIsBoundedByTwoOverN) {
    // Across the sign change the cutoff jumps from -1/n to 1/n, so the
    // unit Lipschitz bound cannot hold for pairs straddling zero.
    const TruncationLevel level(10);
    EXPECT_NEAR(std::abs(cutoff(level, 0.01) - cutoff(level, -0.01)), 0.2, 1e-15);
    std::mt19937_64 eng(8);
    for (int i = 0; i < 10000; ++i) {
        const double M1 = random_value(eng), M2 = random_value(eng);
        ASSERT_LE(std::abs(cutoff(level, M1) - cutoff(level, M2)), std::abs(M1 - M2) + 2.0 / 10 + 1e-15);
    }
}

TEST(TruncatedCoefficients, IdentityAboveFloor) {
    const auto s = stocsf::testing::random_smooth_state(4, 32, 0.5);
    const auto a = truncated_coefficients(s, 0.1, TruncationLevel(10));
    const auto b = ito_coefficients(s, 0.1);
    EXPECT_EQ(a.drift_f, b.drift_f);
    EXPECT_EQ(a.diff_f, b.diff_f);
    EXPECT_EQ(a.drift_L, b.drift_L);
    EXPECT_EQ(a.diff_L, b.diff_L);
}

TEST(TruncatedCoefficients, LiftsShortLength) {
    const int n = 4;
    const CurvatureState shortened{std::vector<double>(16, 1.0), 1.0 / (2 * n), 0.0};
    const CurvatureState lifted{std::vector<double>(16, 1.0), 1.0 / n, 0.0};
    const auto a = truncated_coefficients(shortened, 0.2, TruncationLevel(n));
    const auto b = ito_coefficients(lifted, 0.2);
    EXPECT_EQ(a.drift_f, b.drift_f);
    EXPECT_EQ(a.drift_L, b.drift_L);
    EXPECT_EQ(a.diff_L, b.diff_L);
}

TEST(TruncatedCoefficients, StabilizesForLargeLevels) {
    const CurvatureState s{std::vector<double>(16, 2.0), 0.03, 0.0};
    const auto exact = ito_coefficients(s, 0.1);
    EXPECT_NE(truncated_coefficients(s, 0.1, TruncationLevel(10)).drift_L, exact.drift_L);
    for (int n : {34, 100, 1000}) {
        EXPECT_EQ(truncated_coefficients(s, 0.1, TruncationLevel(n)).drift_L, exact.drift_L) << n;
    }
}

TEST(TruncatedRun, CoincidesWhileLengthStaysInRange) {
    const CurvatureState circle{std::vector<double>(16, 1.0), kTwoPi, 0.0};
    FlowConfig plain;
    plain.N = 16;
    plain.sigma = 0.1;
    plain.dt = 1e-4;
    plain.t_end = 0.1;
    plain.seed = 13;
    FlowConfig truncated = plain;
    truncated.trunc_n = 10;
    const auto path = sample_path(13, plain.dt, 1000);
    for (Scheme scheme : {Scheme::euler_maruyama, Scheme::heun_stratonovich, Scheme::imex}) {
        plain.scheme = truncated.scheme = scheme;
        const auto a = run_flow(circle, plain, path, 10);
        const auto b = run_flow(circle, truncated, path, 10);
        ASSERT_EQ(a.snapshots.size(), b.snapshots.size());
        for (std::size_t i = 0; i < a.snapshots.size(); ++i) {
            ASSERT_GT(a.snapshots[i].L, 0.1);
            ASSERT_LT(a.snapshots[i].L, 10.0);
            EXPECT_NEAR(a.snapshots[i].L, b.snapshots[i].L, 1e-12);
            for (std::size_t j = 0; j < 16; ++j) EXPECT_NEAR(a.snapshots[i].f[j], b.snapshots[i].f[j], 1e-12);
        }
    }
}

TEST(TruncatedRun, ThresholdsFollowLevel) {
    FlowConfig c;
    c.trunc_n = 20;
    const auto th = thresholds(c);
    EXPECT_DOUBLE_EQ(th.f_max, 20.0 * kEmbeddingConstant);
    EXPECT_DOUBLE_EQ(th.L_min, 0.05);
    EXPECT_DOUBLE_EQ(th.L_max, 20.0);
    c.blowup_L_min = 1e-3;
    EXPECT_DOUBLE_EQ(thresholds(c).L_min, 1e-3);
}
