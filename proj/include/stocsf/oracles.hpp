#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "blowup.hpp"
#include "dynamics.hpp"
#include "errors.hpp"
#include "exact_length.hpp"
#include "flow.hpp"
#include "geometry.hpp"
#include "noise.hpp"
#include "parallel.hpp"

namespace stocsf {

// ---------------------------------------------------------------------------
// Circle reduction

struct CircleSample {
    double t = 0.0;
    double f = 0.0;  // 1/R
    double L = 0.0;  // 2 pi R
};

/// Number of fine reference steps per coarse step.
inline constexpr std::size_t kCircleRefinement = 100;

/// Radius SDE of a round circle under the flow,
///   dR = (-1/R + 2 sigma^2 pi^2 R) dt - 2 pi sigma R dW,
/// integrated with Euler-Maruyama at dt/100 on `path` (whose step must be
/// dt/100 or an integer fraction of it). Returns (1/R, 2 pi R) on the
/// coarse grid, including t = 0.
inline std::vector<CircleSample> circle_sde_reference(double R0, double sigma, const BrownianPath& path, double dt,
                                                      double t_end) {
    if (!(R0 > 0.0)) throw InvalidInput("R0 must be positive");
    if (!(dt > 0.0) || !(t_end > 0.0)) throw InvalidInput("dt and t_end must be positive");
    const auto steps = static_cast<std::size_t>(std::floor(t_end / dt * (1.0 + 1e-12)));
    const double h = dt / static_cast<double>(kCircleRefinement);
    const BrownianPath fine = align_path(path, h, steps * kCircleRefinement);
    const double drift_gain = 2.0 * sigma * sigma * kPi * kPi;

    std::vector<CircleSample> out;
    out.reserve(steps + 1);
    double R = R0;
    out.push_back({0.0, 1.0 / R, kTwoPi * R});
    for (std::size_t k = 0; k < steps; ++k) {
        for (std::size_t i = 0; i < kCircleRefinement; ++i) {
            const double dW = fine.increments[k * kCircleRefinement + i];
            R += (-1.0 / R + drift_gain * R) * h - kTwoPi * sigma * R * dW;
            if (!(R > 0.0)) throw ShrinkSignal("circle reference radius became nonpositive");
        }
        out.push_back({static_cast<double>(k + 1) * dt, 1.0 / R, kTwoPi * R});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Area law (external oracle, not from the curvature formulation itself):
// classical curve shortening decreases enclosed area at rate 2 pi.

struct AreaResidual {
    double t = 0.0;
    double area = 0.0;
    double residual = 0.0;
};

/// Enclosed area of the curve reconstructed from a state (origin, angle 0,
/// 4N stations; the duplicated endpoint is dropped).
inline double reconstructed_area(const CurvatureState& state) {
    Curve c = reconstruct_curve(state, Point2{}, 0.0, 4 * state.size());
    c.points.pop_back();
    c.closed = true;
    return enclosed_area(c);
}

inline std::vector<AreaResidual> deterministic_area_law(const TrajectoryRecord& trajectory) {
    if (trajectory.snapshots.empty()) throw InvalidInput("trajectory has no snapshots");
    if (effective_sigma(trajectory.config) != 0.0) throw InvalidInput("area law requires a sigma = 0 trajectory");
    std::vector<AreaResidual> out;
    out.reserve(trajectory.snapshots.size());
    const double t0 = trajectory.snapshots.front().t;
    double A0 = 0.0;
    for (const auto& snap : trajectory.snapshots) {
        const double A = reconstructed_area(snap.state());
        if (out.empty()) A0 = A;
        out.push_back({snap.t, A, std::abs(A - (A0 - kTwoPi * (snap.t - t0)))});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Strong convergence order

struct OrderEstimate {
    std::vector<double> dts;     // strictly decreasing
    std::vector<double> errors;  // mean over seeds of the pathwise sup-error
    double fitted_order = 0.0;
    std::vector<std::uint64_t> excluded_seeds;  // blew up before t_end
};

/// Least-squares slope of log(errors) against log(dts).
inline double fit_loglog_slope(std::span<const double> dts, std::span<const double> errors) {
    if (dts.size() != errors.size() || dts.size() < 2) throw InvalidInput("need at least two (dt, error) pairs");
    const auto n = static_cast<double>(dts.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < dts.size(); ++i) {
        if (!(dts[i] > 0.0) || !(errors[i] > 0.0)) throw InvalidInput("log-log fit needs positive values");
        mx += std::log(dts[i]);
        my += std::log(errors[i]);
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < dts.size(); ++i) {
        const double x = std::log(dts[i]) - mx;
        sxy += x * (std::log(errors[i]) - my);
        sxx += x * x;
    }
    return sxy / sxx;
}

/// Extra halvings between the finest tested step and the reference step.
inline constexpr int kDefaultReferenceHalvings = 3;

namespace detail {

/// Integrates on `noise` (already at the level step) and returns the states
/// at every `stride`-th step, or nullopt if the path blows up.
inline std::optional<std::vector<CurvatureState>> sampled_solution(const CurvatureState& initial,
                                                                   const FlowConfig& config,
                                                                   const BrownianPath& noise, std::size_t stride) {
    const BlowupThresholds th = thresholds(config);
    std::vector<CurvatureState> out;
    out.reserve(noise.count() / stride + 1);
    CurvatureState s = initial;
    out.push_back(s);
    for (std::size_t k = 0; k < noise.count(); ++k) {
        try {
            s = step(s, config, noise.increments[k]);
        } catch (const ShrinkSignal&) {
            return std::nullopt;
        }
        if (detect_blowup(s, th)) return std::nullopt;
        if ((k + 1) % stride == 0) out.push_back(s);
    }
    return out;
}

inline double pathwise_sup_error(const std::vector<CurvatureState>& a, const std::vector<CurvatureState>& b) {
    double err = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double df = 0.0;
        for (std::size_t j = 0; j < a[i].size(); ++j) df = std::max(df, std::abs(a[i].f[j] - b[i].f[j]));
        err = std::max(err, std::abs(a[i].L - b[i].L) + df);
    }
    return err;
}

}  // namespace detail

/// Pathwise strong error of config.scheme at dt, dt/2, ..., dt/2^(refinements-1)
/// against a reference at dt/2^(refinements-1+reference_halvings), all driven
/// by coarsened views of one Brownian path per seed. The error of a level is
/// sup over the coarse time grid of |L - L_ref| + max_r |f - f_ref|; errors are
/// averaged over the seeds that did not blow up.
inline OrderEstimate estimate_strong_order(const CurvatureState& initial, const FlowConfig& config,
                                           std::span<const std::uint64_t> seeds, int refinements,
                                           int reference_halvings = kDefaultReferenceHalvings) {
    validate(config);
    validate(initial);
    if (refinements < 3) throw InvalidInput("refinements must be at least 3");
    if (reference_halvings < 1) throw InvalidInput("reference must be finer than the finest level");
    if (seeds.empty()) throw InvalidInput("need at least one seed");

    const std::size_t coarse_steps = step_count(config);
    const std::size_t ref_factor = std::size_t{1} << (refinements - 1 + reference_halvings);
    const double ref_dt = config.dt / static_cast<double>(ref_factor);

    std::vector<std::optional<std::vector<double>>> per_seed(seeds.size());
    parallel_for(seeds.size(), [&](std::size_t s) {
        const BrownianPath fine = sample_path(seeds[s], ref_dt, static_cast<std::int64_t>(coarse_steps * ref_factor));
        FlowConfig ref_cfg = config;
        ref_cfg.dt = ref_dt;
        const auto ref = detail::sampled_solution(initial, ref_cfg, fine, ref_factor);
        if (!ref) return;
        std::vector<double> errs;
        for (int k = 0; k < refinements; ++k) {
            const std::size_t level_factor = std::size_t{1} << k;
            FlowConfig cfg = config;
            cfg.dt = config.dt / static_cast<double>(level_factor);
            const BrownianPath noise = coarsen(fine, static_cast<std::int64_t>(ref_factor / level_factor));
            const auto sol = detail::sampled_solution(initial, cfg, noise, level_factor);
            if (!sol) return;
            errs.push_back(detail::pathwise_sup_error(*sol, *ref));
        }
        per_seed[s] = std::move(errs);
    });

    OrderEstimate est;
    est.errors.assign(static_cast<std::size_t>(refinements), 0.0);
    std::size_t used = 0;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
        if (!per_seed[s]) {
            est.excluded_seeds.push_back(seeds[s]);
            continue;
        }
        ++used;
        for (std::size_t k = 0; k < est.errors.size(); ++k) est.errors[k] += (*per_seed[s])[k];
    }
    if (used == 0) throw NumericalStateError("every path blew up before t_end");
    for (auto& e : est.errors) e /= static_cast<double>(used);
    for (int k = 0; k < refinements; ++k) est.dts.push_back(config.dt / static_cast<double>(std::size_t{1} << k));
    est.fitted_order = fit_loglog_slope(est.dts, est.errors);
    return est;
}

}  // namespace stocsf
