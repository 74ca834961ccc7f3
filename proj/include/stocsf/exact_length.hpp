#pragma once

#include <cmath>
#include <span>

#include "errors.hpp"
#include "geometry.hpp"

namespace stocsf {

/// L0 exp(-time_integral - 2 sigma pi W_t), where time_integral is the
/// integral over [0, t] of int_T f^2 dr.
inline double length_formula(double L0, double time_integral, double sigma, double W_t) {
    return L0 * std::exp(-time_integral - 2.0 * sigma * kPi * W_t);
}

/// Closed-form length driven by a recorded history of int_T f^2 dr.
///
/// `times` must be increasing, start at 0 and reach t; the time integral is
/// the composite trapezoid over the samples (the last panel is cut at t).
/// The result checks internal consistency of (f, L, W): it is independent
/// of how L was advanced but not of f.
inline double exact_length(double L0, std::span<const double> times, std::span<const double> f_sq,
                           double sigma, double W_t, double t) {
    if (times.size() != f_sq.size() || times.empty()) throw InvalidInput("history arrays must match and be nonempty");
    if (t < times.front() || t > times.back() * (1.0 + 1e-12) + 1e-300) {
        throw InvalidInput("history does not cover [0, t]");
    }
    double integral = 0.0;
    for (std::size_t i = 1; i < times.size() && times[i - 1] < t; ++i) {
        const double t0 = times[i - 1];
        const double t1 = std::min(times[i], t);
        const double w = (t1 - t0) / (times[i] - t0);
        const double g1 = f_sq[i - 1] + w * (f_sq[i] - f_sq[i - 1]);
        integral += 0.5 * (t1 - t0) * (f_sq[i - 1] + g1);
    }
    return length_formula(L0, integral, sigma, W_t);
}

}  // namespace stocsf
