#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "errors.hpp"

namespace stocsf::linalg {

/// Thomas algorithm for a non-cyclic tridiagonal system.
/// Row i reads lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i];
/// lower[0] and upper[n-1] are ignored.
inline std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                             std::span<const double> upper, std::span<const double> rhs) {
    const std::size_t n = diag.size();
    std::vector<double> c(n), d(n), x(n);
    double denom = diag[0];
    if (denom == 0.0) throw NumericalStateError("tridiagonal solve: zero pivot");
    c[0] = upper[0] / denom;
    d[0] = rhs[0] / denom;
    for (std::size_t i = 1; i < n; ++i) {
        denom = diag[i] - lower[i] * c[i - 1];
        if (denom == 0.0 || !std::isfinite(denom)) throw NumericalStateError("tridiagonal solve: zero pivot");
        c[i] = (i + 1 < n) ? upper[i] / denom : 0.0;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / denom;
    }
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

/// Cyclic tridiagonal solve via Sherman-Morrison. Row 0 couples to x[n-1]
/// through lower[0]; row n-1 couples to x[0] through upper[n-1].
inline std::vector<double> solve_cyclic_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                                    std::span<const double> upper, std::span<const double> rhs) {
    const std::size_t n = diag.size();
    if (n < 3) throw NumericalStateError("cyclic tridiagonal solve needs n >= 3");
    const double alpha = upper[n - 1];  // A(n-1, 0)
    const double beta = lower[0];       // A(0, n-1)
    const double gamma = -diag[0];

    std::vector<double> b(diag.begin(), diag.end());
    b[0] -= gamma;
    b[n - 1] -= alpha * beta / gamma;

    const std::vector<double> x = solve_tridiagonal(lower, b, upper, rhs);
    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = alpha;
    const std::vector<double> z = solve_tridiagonal(lower, b, upper, u);

    const double denom = 1.0 + z[0] + beta * z[n - 1] / gamma;
    if (denom == 0.0 || !std::isfinite(denom)) throw NumericalStateError("cyclic tridiagonal solve: singular");
    const double factor = (x[0] + beta * x[n - 1] / gamma) / denom;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] - factor * z[i];
    return out;
}

}  // namespace stocsf::linalg
