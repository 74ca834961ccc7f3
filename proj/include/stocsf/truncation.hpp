#pragma once

#include <cmath>

#include "errors.hpp"

namespace stocsf {

/// Truncation level n >= 1 of the length cutoff.
class TruncationLevel {
public:
    explicit TruncationLevel(int n) : n_(n) {
        if (n < 1) throw InvalidInput("truncation level must be at least 1");
    }
    int value() const { return n_; }
    double floor() const { return 1.0 / static_cast<double>(n_); }

private:
    int n_;
};

/// Cutoff T_n: lifts magnitudes below 1/n to exactly 1/n, keeping the sign,
/// and is the identity on |M| >= 1/n. T_n(0) = 1/n.
inline double cutoff(TruncationLevel n, double M) {
    const double lo = n.floor();
    if (std::abs(M) >= lo) return M;
    if (M == 0.0) return lo;
    return M / (static_cast<double>(n.value()) * std::abs(M));
}

}  // namespace stocsf
