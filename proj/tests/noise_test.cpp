#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "stocsf/noise.hpp"

using namespace stocsf;

TEST(SamplePath, Deterministic) {
    const auto a = sample_path(42, 1e-3, 100000);
    const auto b = sample_path(42, 1e-3, 100000);
    EXPECT_EQ(a.increments, b.increments);
    EXPECT_EQ(a.W, b.W);
    EXPECT_NE(sample_path(43, 1e-3, 1000).increments, prefix(a, 1000).increments);
}

TEST(SamplePath, IncrementVariance) {
    const auto p = sample_path(42, 1e-3, 100000);
    const double n = static_cast<double>(p.count());
    const double m = std::accumulate(p.increments.begin(), p.increments.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : p.increments) ss += (x - m) * (x - m);
    const double var = ss / (n - 1);
    EXPECT_GE(var, 0.97e-3);
    EXPECT_LE(var, 1.03e-3);
}

TEST(SamplePath, StartsAtZeroAndAccumulates) {
    const auto p = sample_path(5, 1e-2, 50);
    ASSERT_EQ(p.W.size(), 51u);
    EXPECT_EQ(p.W[0], 0.0);
    for (std::size_t k = 0; k < p.count(); ++k) EXPECT_DOUBLE_EQ(p.W[k + 1], p.W[k] + p.increments[k]);
}

TEST(SamplePath, Lag1AutocorrelationSmall) {
    const auto p = sample_path(42, 1e-3, 100000);
    const auto& x = p.increments;
    const double n = static_cast<double>(x.size());
    const double m = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        den += (x[i] - m) * (x[i] - m);
        if (i + 1 < x.size()) num += (x[i] - m) * (x[i + 1] - m);
    }
    EXPECT_LT(std::abs(num / den), 0.02);
}

TEST(SamplePath, RejectsBadArguments) {
    EXPECT_THROW(sample_path(1, 0.0, 10), InvalidInput);
    EXPECT_THROW(sample_path(1, -1e-3, 10), InvalidInput);
    EXPECT_THROW(sample_path(1, 1e-3, 0), InvalidInput);
}

TEST(Coarsen, FactorOneIsIdentity) {
    const auto p = sample_path(9, 1e-3, 64);
    const auto c = coarsen(p, 1);
    EXPECT_EQ(c.increments, p.increments);
    EXPECT_EQ(c.W, p.W);
    EXPECT_EQ(c.base_dt, p.base_dt);
}

TEST(Coarsen, Associative) {
    const auto p = sample_path(9, 1e-3, 64);
    const auto twice = coarsen(coarsen(p, 2), 2);
    const auto once = coarsen(p, 4);
    EXPECT_EQ(twice.increments, once.increments);
    EXPECT_EQ(twice.W, once.W);
    EXPECT_DOUBLE_EQ(once.base_dt, 4e-3);
}

TEST(Coarsen, SharesGridValues) {
    const auto p = sample_path(9, 1e-3, 96);
    const auto c = coarsen(p, 3);
    ASSERT_EQ(c.count(), 32u);
    for (std::size_t k = 0; k <= c.count(); ++k) EXPECT_EQ(c.W[k], p.W[3 * k]);
    EXPECT_EQ(c.W.back(), p.W.back());
}

TEST(Coarsen, RejectsNonDivisor) {
    const auto p = sample_path(9, 1e-3, 10);
    EXPECT_THROW(coarsen(p, 3), InvalidInput);
    EXPECT_THROW(coarsen(p, 0), InvalidInput);
}

TEST(PathFile, BinaryRoundTrip) {
    const auto p = sample_path(77, 1e-4, 500);
    std::stringstream ss;
    write_path(ss, p);
    const auto q = read_path(ss, 1e-4);
    EXPECT_EQ(q.seed, p.seed);
    EXPECT_EQ(q.increments, p.increments);
    EXPECT_EQ(q.W, p.W);
}

TEST(PathFile, RejectsBadMagic) {
    std::stringstream ss("NOTAPATH and some more bytes here");
    EXPECT_THROW(read_path(ss, 1e-3), InvalidInput);
}
