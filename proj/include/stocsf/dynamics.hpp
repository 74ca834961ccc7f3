#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "tridiagonal.hpp"
#include "truncation.hpp"

namespace stocsf {

enum class Scheme { euler_maruyama, heun_stratonovich, imex, deterministic };

inline std::string_view to_string(Scheme s) {
    switch (s) {
        case Scheme::euler_maruyama: return "euler_maruyama";
        case Scheme::heun_stratonovich: return "heun_stratonovich";
        case Scheme::imex: return "imex";
        case Scheme::deterministic: return "deterministic";
    }
    return "unknown";
}

inline Scheme parse_scheme(std::string_view name) {
    if (name == "euler_maruyama" || name == "em") return Scheme::euler_maruyama;
    if (name == "heun_stratonovich" || name == "heun") return Scheme::heun_stratonovich;
    if (name == "imex") return Scheme::imex;
    if (name == "deterministic") return Scheme::deterministic;
    throw InvalidInput("unknown scheme '" + std::string(name) + "'");
}

/// Sup-norm embedding constant used for the default curvature threshold
/// n * C when a truncation level is set.
inline constexpr double kEmbeddingConstant = 1.0;

inline constexpr double kDefaultCurvatureMax = 1e6;
inline constexpr double kDefaultLengthMin = 1e-3;
inline constexpr double kDefaultLengthMax = 1e3;

struct FlowConfig {
    double sigma = 0.0;
    std::size_t N = 128;
    double dt = 1e-5;
    double t_end = 1.0;
    Scheme scheme = Scheme::euler_maruyama;
    std::optional<int> trunc_n;
    // Unset thresholds fall back to the truncation-level values when
    // trunc_n is set, otherwise to the kDefault* constants.
    std::optional<double> blowup_f_max;
    std::optional<double> blowup_L_min;
    std::optional<double> blowup_L_max;
    std::uint64_t seed = 0;

    friend bool operator==(const FlowConfig&, const FlowConfig&) = default;
};

struct BlowupThresholds {
    double f_max;
    double L_min;
    double L_max;
};

inline BlowupThresholds thresholds(const FlowConfig& c) {
    BlowupThresholds t{kDefaultCurvatureMax, kDefaultLengthMin, kDefaultLengthMax};
    if (c.trunc_n) {
        const double n = *c.trunc_n;
        t = {n * kEmbeddingConstant, 1.0 / n, n};
    }
    if (c.blowup_f_max) t.f_max = *c.blowup_f_max;
    if (c.blowup_L_min) t.L_min = *c.blowup_L_min;
    if (c.blowup_L_max) t.L_max = *c.blowup_L_max;
    return t;
}

inline void validate(const FlowConfig& c) {
    if (!(c.sigma >= 0.0) || !std::isfinite(c.sigma)) throw InvalidInput("sigma must be nonnegative");
    if (c.N < kMinGrid) throw InvalidInput("grid must be at least 8");
    if (!(c.dt > 0.0) || !std::isfinite(c.dt)) throw InvalidInput("dt must be positive");
    if (!(c.t_end > 0.0) || !std::isfinite(c.t_end)) throw InvalidInput("t_end must be positive");
    if (c.trunc_n && *c.trunc_n < 1) throw InvalidInput("trunc_n must be a positive integer");
    const auto th = thresholds(c);
    if (!(th.f_max > 0.0)) throw InvalidInput("blowup_f_max must be positive");
    if (!(th.L_min >= 0.0)) throw InvalidInput("blowup_l_min must be nonnegative");
    if (!(th.L_max > th.L_min)) throw InvalidInput("blowup_l_max must exceed blowup_l_min");
}

/// Number of steps; t_end is rounded down to a whole number of steps.
inline std::size_t step_count(const FlowConfig& c) {
    return static_cast<std::size_t>(std::floor(c.t_end / c.dt * (1.0 + 1e-12)));
}

/// Largest dt for which the explicit schemes are considered safe:
/// 0.25 (dr L)^2 / (1 + 2 sigma^2 pi^2 L^2).
inline double stable_dt_bound(std::size_t N, double L, double sigma) {
    const double h = L / static_cast<double>(N);
    return 0.25 * h * h / (1.0 + 2.0 * sigma * sigma * kPi * kPi * L * L);
}

/// Drift and diffusion of the (f, L) system on the grid.
struct CoefficientFields {
    std::vector<double> drift_f;
    double drift_L = 0.0;
    std::vector<double> diff_f;
    double diff_L = 0.0;
};

namespace detail {

struct GridDerivatives {
    std::vector<double> d1;  // f_r
    std::vector<double> d2;  // f_rr
};

/// Second-order central differences on the periodic grid.
inline GridDerivatives central_differences(std::span<const double> f) {
    const std::size_t n = f.size();
    const double inv_h = static_cast<double>(n);
    GridDerivatives d{std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t j = 0; j < n; ++j) {
        const double fm = f[(j + n - 1) % n];
        const double fp = f[(j + 1) % n];
        d.d1[j] = 0.5 * (fp - fm) * inv_h;
        d.d2[j] = (fp - 2.0 * f[j] + fm) * inv_h * inv_h;
    }
    return d;
}

inline void require_finite(const CurvatureState& s) {
    if (!all_finite(s)) throw NumericalStateError("state contains non-finite values");
}

/// Second-order coefficient 2 sigma^2 pi^2 r^2 + 1/L^2. The coordinate r is
/// taken in [0, 1) and not periodized.
inline double principal_coefficient(double r, double L, double sigma) {
    return 2.0 * sigma * sigma * kPi * kPi * r * r + 1.0 / (L * L);
}

inline std::vector<double> diffusion_f(std::span<const double> f, const GridDerivatives& d, double L,
                                       double sigma) {
    const std::size_t n = f.size();
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double r = static_cast<double>(j) / static_cast<double>(n);
        out[j] = sigma * (f[j] * f[j] * L - kTwoPi * r * d.d1[j]);
    }
    return out;
}

inline CoefficientFields ito_fields(std::span<const double> f, double L, double sigma) {
    const std::size_t n = f.size();
    const auto d = central_differences(f);
    const double I = integral_of_square(f);
    const double s2 = sigma * sigma;
    const double pi = kPi;

    CoefficientFields c;
    c.drift_f.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double r = static_cast<double>(j) / static_cast<double>(n);
        const double fj = f[j];
        const double fr = d.d1[j];
        c.drift_f[j] = principal_coefficient(r, L, sigma) * d.d2[j]
                     - 4.0 * s2 * pi * r * L * fj * fr
                     + 2.0 * s2 * pi * pi * r * fr
                     - r * fr * I
                     + fj * fj * fj
                     + s2 * fj * fj * fj * L * L
                     - s2 * pi * fj * fj * L;
    }
    c.drift_L = L * (2.0 * s2 * pi * pi - I);
    c.diff_f = diffusion_f(f, d, L, sigma);
    c.diff_L = -2.0 * sigma * pi * L;
    return c;
}

inline CoefficientFields stratonovich_fields(std::span<const double> f, double L, double sigma) {
    const std::size_t n = f.size();
    const auto d = central_differences(f);
    const double I = integral_of_square(f);

    CoefficientFields c;
    c.drift_f.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double r = static_cast<double>(j) / static_cast<double>(n);
        const double fj = f[j];
        c.drift_f[j] = d.d2[j] / (L * L) + fj * fj * fj - r * d.d1[j] * I;
    }
    c.drift_L = -L * I;
    c.diff_f = diffusion_f(f, d, L, sigma);
    c.diff_L = -2.0 * sigma * kPi * L;
    return c;
}

inline double effective_length(double L, std::optional<int> trunc_n) {
    return trunc_n ? cutoff(TruncationLevel(*trunc_n), L) : L;
}

}  // namespace detail

/// Drift and diffusion of the Ito form of the rescaled system.
inline CoefficientFields ito_coefficients(const CurvatureState& state, double sigma) {
    validate(state);
    detail::require_finite(state);
    return detail::ito_fields(state.f, state.L, sigma);
}

/// Drift and diffusion of the Stratonovich form (chain-rule form, no sigma^2
/// drift terms). The diffusion agrees with the Ito form.
inline CoefficientFields stratonovich_coefficients(const CurvatureState& state, double sigma) {
    validate(state);
    detail::require_finite(state);
    return detail::stratonovich_fields(state.f, state.L, sigma);
}

/// Ito coefficients with every occurrence of L replaced by T_n L.
inline CoefficientFields truncated_coefficients(const CurvatureState& state, double sigma, TruncationLevel n) {
    validate(state);
    detail::require_finite(state);
    return detail::ito_fields(state.f, cutoff(n, state.L), sigma);
}

/// Drift part of a CoefficientFields-like object.
struct DriftCorrection {
    std::vector<double> drift_f;
    double drift_L = 0.0;
};

/// Stratonovich-to-Ito drift correction, assembled from the three
/// conversion rules
///   L o dW      = L dW      - sigma pi L dt
///   f_r o dW    = f_r dW    + (sigma f f_r L - sigma pi f_r - sigma pi r f_rr) dt
///   f^2 L o dW  = f^2 L dW  + (sigma f^3 L^2 - 2 sigma pi r f f_r L - sigma pi f^2 L) dt
/// applied to the diffusion sigma (f^2 L - 2 pi r f_r) and -2 sigma pi L.
inline DriftCorrection ito_correction(const CurvatureState& state, double sigma) {
    validate(state);
    const std::size_t n = state.size();
    const auto d = detail::central_differences(state.f);
    const double L = state.L;
    const double pi = kPi;

    DriftCorrection out;
    out.drift_f.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double r = state.r(j);
        const double f = state.f[j];
        const double fr = d.d1[j];
        const double frr = d.d2[j];
        const double corr_f2L = sigma * f * f * f * L * L - 2.0 * sigma * pi * r * f * fr * L - sigma * pi * f * f * L;
        const double corr_fr = sigma * f * fr * L - sigma * pi * fr - sigma * pi * r * frr;
        out.drift_f[j] = sigma * corr_f2L - 2.0 * pi * r * sigma * corr_fr;
    }
    const double corr_L = -sigma * pi * L;
    out.drift_L = -2.0 * sigma * pi * corr_L;
    return out;
}

namespace detail {

inline CurvatureState finish_step(const CurvatureState& from, std::vector<double> f, double L, double dt) {
    CurvatureState next{std::move(f), L, from.t + dt};
    if (std::isnan(L)) throw NumericalStateError("length became NaN");
    if (!(L > 0.0)) throw ShrinkSignal("length became nonpositive at t=" + std::to_string(next.t));
    require_finite(next);
    return next;
}

inline CoefficientFields scheme_ito(const CurvatureState& s, double sigma, std::optional<int> trunc_n) {
    require_finite(s);
    return ito_fields(s.f, effective_length(s.L, trunc_n), sigma);
}

inline CoefficientFields scheme_stratonovich(const CurvatureState& s, double sigma, std::optional<int> trunc_n) {
    require_finite(s);
    return stratonovich_fields(s.f, effective_length(s.L, trunc_n), sigma);
}

/// Heun predictor-corrector for a generic coefficient map.
template <typename Coefficients>
CurvatureState heun_step(const CurvatureState& s, double dt, double dW, Coefficients&& coeffs) {
    const std::size_t n = s.size();
    const CoefficientFields c0 = coeffs(s);
    CurvatureState pred{std::vector<double>(n), s.L + dt * c0.drift_L + dW * c0.diff_L, s.t + dt};
    for (std::size_t j = 0; j < n; ++j) pred.f[j] = s.f[j] + dt * c0.drift_f[j] + dW * c0.diff_f[j];
    // A predictor outside L > 0 means the step cannot resolve the collapse.
    if (std::isnan(pred.L)) throw NumericalStateError("predictor length became NaN");
    if (!(pred.L > 0.0)) throw ShrinkSignal("predicted length became nonpositive at t=" + std::to_string(pred.t));
    const CoefficientFields c1 = coeffs(pred);
    std::vector<double> f(n);
    for (std::size_t j = 0; j < n; ++j) {
        f[j] = s.f[j] + 0.5 * dt * (c0.drift_f[j] + c1.drift_f[j]) + 0.5 * dW * (c0.diff_f[j] + c1.diff_f[j]);
    }
    const double L = s.L + 0.5 * dt * (c0.drift_L + c1.drift_L) + 0.5 * dW * (c0.diff_L + c1.diff_L);
    return finish_step(s, std::move(f), L, dt);
}

}  // namespace detail

/// One Euler-Maruyama step of the Ito system.
inline CurvatureState step_euler_maruyama(const CurvatureState& state, const FlowConfig& config, double dW) {
    const auto c = detail::scheme_ito(state, config.sigma, config.trunc_n);
    const double dt = config.dt;
    std::vector<double> f(state.size());
    for (std::size_t j = 0; j < f.size(); ++j) f[j] = state.f[j] + dt * c.drift_f[j] + dW * c.diff_f[j];
    return detail::finish_step(state, std::move(f), state.L + dt * c.drift_L + dW * c.diff_L, dt);
}

/// One Heun (trapezoidal predictor-corrector) step of the Stratonovich system.
inline CurvatureState step_heun_stratonovich(const CurvatureState& state, const FlowConfig& config, double dW) {
    return detail::heun_step(state, config.dt, dW, [&](const CurvatureState& s) {
        return detail::scheme_stratonovich(s, config.sigma, config.trunc_n);
    });
}

/// Deterministic flow (sigma = 0, noise ignored) advanced with classical Heun.
inline CurvatureState step_deterministic(const CurvatureState& state, const FlowConfig& config) {
    return detail::heun_step(state, config.dt, 0.0, [&](const CurvatureState& s) {
        return detail::scheme_ito(s, 0.0, config.trunc_n);
    });
}

/// Semi-implicit step: the principal term (2 sigma^2 pi^2 r^2 + 1/L^2) f_rr is
/// backward Euler with coefficients frozen at the current state; the rest
/// of the Ito drift and the diffusion are explicit. L is explicit.
inline CurvatureState step_imex(const CurvatureState& state, const FlowConfig& config, double dW) {
    detail::require_finite(state);
    const std::size_t n = state.size();
    const double L_eff = detail::effective_length(state.L, config.trunc_n);
    const auto c = detail::ito_fields(state.f, L_eff, config.sigma);
    const auto d = detail::central_differences(state.f);
    const double dt = config.dt;
    const double inv_h2 = static_cast<double>(n) * static_cast<double>(n);

    std::vector<double> lower(n), diag(n), upper(n), rhs(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double a = detail::principal_coefficient(state.r(j), L_eff, config.sigma);
        const double explicit_drift = c.drift_f[j] - a * d.d2[j];
        rhs[j] = state.f[j] + dt * explicit_drift + dW * c.diff_f[j];
        const double off = -dt * a * inv_h2;
        lower[j] = off;
        upper[j] = off;
        diag[j] = 1.0 - 2.0 * off;
    }
    auto f = linalg::solve_cyclic_tridiagonal(lower, diag, upper, rhs);
    return detail::finish_step(state, std::move(f), state.L + dt * c.drift_L + dW * c.diff_L, dt);
}

/// Dispatches on config.scheme.
inline CurvatureState step(const CurvatureState& state, const FlowConfig& config, double dW) {
    switch (config.scheme) {
        case Scheme::euler_maruyama: return step_euler_maruyama(state, config, dW);
        case Scheme::heun_stratonovich: return step_heun_stratonovich(state, config, dW);
        case Scheme::imex: return step_imex(state, config, dW);
        case Scheme::deterministic: return step_deterministic(state, config);
    }
    throw InvalidInput("unknown scheme");
}

/// Normal speed V(k, s, t) for the general moving-boundary form.
using SpeedFunction = std::function<double(double k, double s, double t)>;

struct StefanRhs {
    std::vector<double> dk;  // d/dt of k at each grid station
    double dL = 0.0;
};

/// Right-hand side of the general curvature/length system
///   k_t = V_ss + k^2 V,   L_t = -int_0^L k V ds
/// for k sampled at s_j = j L / N. V_ss by central differences in s, the
/// integral by the rectangle rule.
inline StefanRhs general_stefan_rhs(const CurvatureState& state, const SpeedFunction& V) {
    validate(state);
    const std::size_t n = state.size();
    const double ds = state.L / static_cast<double>(n);
    std::vector<double> v(n);
    for (std::size_t j = 0; j < n; ++j) {
        v[j] = V(state.f[j], static_cast<double>(j) * ds, state.t);
        if (!std::isfinite(v[j])) throw NumericalStateError("speed function returned a non-finite value");
    }
    StefanRhs out;
    out.dk.resize(n);
    double integral = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double vss = (v[(j + 1) % n] - 2.0 * v[j] + v[(j + n - 1) % n]) / (ds * ds);
        out.dk[j] = vss + state.f[j] * state.f[j] * v[j];
        integral += state.f[j] * v[j];
    }
    out.dL = -integral * ds;
    return out;
}

}  // namespace stocsf
