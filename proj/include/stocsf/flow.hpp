#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "blowup.hpp"
#include "dynamics.hpp"
#include "errors.hpp"
#include "exact_length.hpp"
#include "geometry.hpp"
#include "noise.hpp"

namespace stocsf {

struct SnapshotDiagnostics {
    double turning_number = 0.0;
    double f_sq_integral = 0.0;
    double closure_defect = 0.0;
    double exact_length_residual = 0.0;
    double sup_f = 0.0;

    friend bool operator==(const SnapshotDiagnostics&, const SnapshotDiagnostics&) = default;
};

struct Snapshot {
    std::size_t step = 0;
    double t = 0.0;
    double L = 0.0;
    double W = 0.0;
    std::vector<double> f;
    SnapshotDiagnostics diagnostics;

    CurvatureState state() const { return CurvatureState{f, L, t}; }

    friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

struct TrajectoryRecord {
    FlowConfig config;
    std::vector<Snapshot> snapshots;
    StopReason reason = StopReason::completed;
    double stop_time = 0.0;
    std::vector<std::string> warnings;
    // Not persisted in the trajectory file.
    double wall_seconds = 0.0;

    std::uint64_t seed() const { return config.seed; }
    const Snapshot& final_snapshot() const { return snapshots.back(); }
    bool stopped_early() const { return reason != StopReason::completed; }
};

inline constexpr std::size_t kMaxSnapshots = 2000;

/// Cadence keeping a run at or below kMaxSnapshots snapshots (plus the
/// initial one).
inline std::size_t default_snapshot_every(std::size_t steps) {
    return std::max<std::size_t>(1, (steps + kMaxSnapshots - 1) / kMaxSnapshots);
}

/// Brownian increments at the config step size, taken from `path` (which
/// may be finer by an integer factor).
inline BrownianPath align_path(const BrownianPath& path, double dt, std::size_t steps) {
    if (!(path.base_dt > 0.0)) throw InvalidInput("Brownian path has no step size");
    const double ratio = dt / path.base_dt;
    const auto factor = static_cast<std::int64_t>(std::llround(ratio));
    if (factor < 1 || std::abs(ratio - static_cast<double>(factor)) > 1e-9 * ratio) {
        throw InvalidInput("dt is not an integer multiple of the Brownian path step");
    }
    const std::size_t needed = steps * static_cast<std::size_t>(factor);
    if (path.count() < needed) {
        throw InvalidInput("Brownian path too short: need " + std::to_string(needed) + " increments, have " +
                           std::to_string(path.count()));
    }
    return coarsen(prefix(path, needed), factor);
}

/// Noise intensity actually applied by the configured scheme.
inline double effective_sigma(const FlowConfig& config) {
    return config.scheme == Scheme::deterministic ? 0.0 : config.sigma;
}

inline bool is_explicit(Scheme s) { return s != Scheme::imex; }

/// Advances `initial` with the configured scheme until t_end or until the
/// blow-up detector fires. Snapshots are taken at step 0, every
/// `snapshot_every` steps (0 selects the default cadence), and at the last
/// state reached.
inline TrajectoryRecord run_flow(const CurvatureState& initial, const FlowConfig& config, const BrownianPath& path,
                                 std::size_t snapshot_every = 0) {
    const auto wall_start = std::chrono::steady_clock::now();
    validate(config);
    validate(initial);
    if (initial.size() != config.N) {
        throw InvalidInput("initial state has " + std::to_string(initial.size()) + " samples but grid is " +
                           std::to_string(config.N));
    }
    const std::size_t steps = step_count(config);
    if (steps == 0) throw InvalidInput("t_end is shorter than one step");
    const BrownianPath noise = align_path(path, config.dt, steps);
    const std::size_t every = snapshot_every == 0 ? default_snapshot_every(steps) : snapshot_every;
    const BlowupThresholds th = thresholds(config);
    const double sigma = effective_sigma(config);

    TrajectoryRecord rec;
    rec.config = config;
    if (is_explicit(config.scheme)) {
        const double bound = stable_dt_bound(config.N, initial.L, sigma);
        if (config.dt > bound) {
            rec.warnings.push_back("dt=" + std::to_string(config.dt) + " exceeds the explicit stability estimate " +
                                   std::to_string(bound));
        }
    }

    const double L0 = initial.L;
    double time_integral = 0.0;
    auto snapshot = [&](const CurvatureState& s, std::size_t k, double W) {
        Snapshot snap;
        snap.step = k;
        snap.t = s.t;
        snap.L = s.L;
        snap.W = W;
        snap.f = s.f;
        auto& d = snap.diagnostics;
        d.turning_number = turning_number(s);
        d.f_sq_integral = integral_of_square(s.f);
        d.closure_defect = closure_defect(s);
        const double formula = length_formula(L0, time_integral, sigma, W);
        d.exact_length_residual = std::abs(s.L - formula) / formula;
        d.sup_f = sup_abs(s.f);
        rec.snapshots.push_back(std::move(snap));
    };

    CurvatureState state = initial;
    snapshot(state, 0, 0.0);
    if (auto r = detect_blowup(state, th)) {
        rec.reason = *r;
        rec.stop_time = state.t;
        rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
        return rec;
    }

    double fsq_prev = integral_of_square(state.f);
    for (std::size_t k = 0; k < steps; ++k) {
        CurvatureState next;
        try {
            next = step(state, config, noise.increments[k]);
        } catch (const ShrinkSignal&) {
            rec.reason = StopReason::length_collapse;
            rec.stop_time = state.t;
            if (rec.snapshots.back().step != k) snapshot(state, k, noise.W[k]);
            break;
        }
        next.t = initial.t + static_cast<double>(k + 1) * config.dt;
        const double fsq = integral_of_square(next.f);
        time_integral += 0.5 * config.dt * (fsq_prev + fsq);
        fsq_prev = fsq;
        state = std::move(next);

        const auto reason = detect_blowup(state, th);
        if (reason || (k + 1) % every == 0 || k + 1 == steps) snapshot(state, k + 1, noise.W[k + 1]);
        if (reason) {
            rec.reason = *reason;
            rec.stop_time = state.t;
            break;
        }
    }
    if (rec.reason == StopReason::completed) rec.stop_time = state.t;
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    return rec;
}

}  // namespace stocsf
