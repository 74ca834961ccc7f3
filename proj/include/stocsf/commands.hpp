#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "flow.hpp"
#include "io.hpp"
#include "noise.hpp"
#include "oracles.hpp"
#include "parallel.hpp"

namespace stocsf {

inline constexpr int kExitCompleted = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitBlowup = 2;

struct RunResult {
    int exit_code = kExitCompleted;
    TrajectoryRecord record;
};

inline int exit_code_for(const TrajectoryRecord& rec) {
    return rec.stopped_early() ? kExitBlowup : kExitCompleted;
}

/// Brownian path for one member: seed, at the config step, covering t_end.
inline BrownianPath path_for(const FlowConfig& c) {
    return sample_path(c.seed, c.dt, static_cast<std::int64_t>(step_count(c)));
}

/// Writes trajectory.jsonl, diagnostics.csv, final_state.json, run_meta.json
/// and, optionally, curves/curve_<step>.csv under `dir`.
inline void write_run_outputs(const std::filesystem::path& dir, const TrajectoryRecord& rec, bool write_curves,
                              const std::string& initial_text) {
    std::filesystem::create_directories(dir);
    {
        auto os = io::open_out(dir / "trajectory.jsonl");
        io::write_trajectory(os, rec);
    }
    {
        auto os = io::open_out(dir / "diagnostics.csv");
        io::write_diagnostics_csv(os, rec);
    }
    {
        auto os = io::open_out(dir / "final_state.json");
        os << io::state_to_json(rec.final_snapshot().state()).dump() << '\n';
    }
    {
        nlohmann::json meta{{"initial", initial_text},
                            {"stop_reason", std::string(to_string(rec.reason))},
                            {"wall_seconds", rec.wall_seconds},
                            {"noise_algorithm", kNoiseAlgorithmVersion}};
        auto os = io::open_out(dir / "run_meta.json");
        os << meta.dump(2) << '\n';
    }
    if (write_curves) {
        for (const auto& snap : rec.snapshots) {
            char name[64];
            std::snprintf(name, sizeof name, "curve_%09zu.csv", snap.step);
            const auto state = snap.state();
            Curve c = reconstruct_curve(state, Point2{}, 0.0, 4 * state.size());
            c.points.pop_back();
            auto os = io::open_out(dir / "curves" / name);
            io::write_curve_csv(os, c);
        }
    }
}

/// Single-path run. Blow-up is reported through exit code 2, not as an error.
inline RunResult run_command(const RunSpec& spec) {
    const CurvatureState initial = build_initial_state(spec.initial, spec.flow.N);
    RunResult result;
    result.record = run_flow(initial, spec.flow, path_for(spec.flow), spec.snapshot_every);
    write_run_outputs(spec.output_dir, result.record, spec.write_curves, spec.initial.text);
    result.exit_code = exit_code_for(result.record);
    return result;
}

struct EnsembleMember {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    double t_stop = 0.0;
    double L = 0.0;
    double sup_f = 0.0;
    StopReason reason = StopReason::completed;
    std::vector<double> log_L;  // at the summary times reached
};

struct EnsembleSummaryRow {
    double t = 0.0;
    std::size_t count = 0;
    double mean_log_L = 0.0;
    double var_log_L = 0.0;
    double mean_log_ratio = 0.0;  // mean of log(L / L0)
};

struct EnsembleResult {
    int exit_code = kExitCompleted;
    std::vector<EnsembleMember> members;
    std::vector<EnsembleSummaryRow> summary;
};

/// Per-time mean and (n-1)-normalized variance of log L over members that
/// reached that time.
inline std::vector<EnsembleSummaryRow> summarize(const std::vector<EnsembleMember>& members,
                                                 const std::vector<double>& times, double L0) {
    std::vector<EnsembleSummaryRow> rows;
    for (std::size_t i = 0; i < times.size(); ++i) {
        EnsembleSummaryRow row;
        row.t = times[i];
        double sum = 0.0;
        for (const auto& m : members) {
            if (i < m.log_L.size()) {
                sum += m.log_L[i];
                ++row.count;
            }
        }
        if (row.count == 0) break;
        row.mean_log_L = sum / static_cast<double>(row.count);
        double ss = 0.0;
        for (const auto& m : members) {
            if (i < m.log_L.size()) ss += (m.log_L[i] - row.mean_log_L) * (m.log_L[i] - row.mean_log_L);
        }
        row.var_log_L = row.count > 1 ? ss / static_cast<double>(row.count - 1) : 0.0;
        row.mean_log_ratio = row.mean_log_L - std::log(L0);
        rows.push_back(row);
    }
    return rows;
}

inline void write_summary_csv(const std::filesystem::path& p, const std::vector<EnsembleSummaryRow>& rows) {
    auto os = io::open_out(p);
    os << "t,count,mean_log_L,var_log_L,mean_log_ratio\n";
    for (const auto& r : rows) {
        os << io::format_double(r.t) << ',' << r.count << ',' << io::format_double(r.mean_log_L) << ','
           << io::format_double(r.var_log_L) << ',' << io::format_double(r.mean_log_ratio) << '\n';
    }
}

/// Runs `count` members with seeds seed+0 .. seed+count-1 in parallel and
/// writes ensemble_paths.csv and ensemble_summary.csv. With count == 1 the
/// single member's run outputs are written as well.
inline EnsembleResult ensemble_command(const RunSpec& spec, std::size_t count, unsigned threads = 0) {
    if (count < 1) throw InvalidInput("ensemble count must be at least 1");
    if (count == 1) {
        EnsembleResult out;
        const auto single = run_command(spec);
        const auto& rec = single.record;
        EnsembleMember m{0, spec.flow.seed, rec.stop_time, rec.final_snapshot().L,
                         rec.final_snapshot().diagnostics.sup_f, rec.reason, {}};
        std::vector<double> times;
        for (const auto& s : rec.snapshots) {
            times.push_back(s.t);
            m.log_L.push_back(std::log(s.L));
        }
        out.members.push_back(std::move(m));
        out.summary = summarize(out.members, times, rec.snapshots.front().L);
        out.exit_code = single.exit_code;
        write_summary_csv(std::filesystem::path(spec.output_dir) / "ensemble_summary.csv", out.summary);
        return out;
    }

    const CurvatureState initial = build_initial_state(spec.initial, spec.flow.N);
    const std::size_t steps = step_count(spec.flow);
    const std::size_t every = spec.snapshot_every == 0 ? default_snapshot_every(steps) : spec.snapshot_every;
    std::vector<double> times;
    for (std::size_t k = 0; k <= steps; k += every) times.push_back(static_cast<double>(k) * spec.flow.dt);

    EnsembleResult out;
    out.members.resize(count);
    parallel_for(
        count,
        [&](std::size_t i) {
            FlowConfig cfg = spec.flow;
            cfg.seed = spec.flow.seed + i;
            const TrajectoryRecord rec = run_flow(initial, cfg, path_for(cfg), every);
            EnsembleMember& m = out.members[i];
            m.index = i;
            m.seed = cfg.seed;
            m.t_stop = rec.stop_time;
            m.L = rec.final_snapshot().L;
            m.sup_f = rec.final_snapshot().diagnostics.sup_f;
            m.reason = rec.reason;
            for (const auto& s : rec.snapshots) {
                if (s.step % every != 0) continue;  // early-stop snapshot off the shared grid
                m.log_L.push_back(std::log(s.L));
            }
        },
        threads);
    out.summary = summarize(out.members, times, initial.L);
    for (const auto& m : out.members) {
        if (m.reason != StopReason::completed) out.exit_code = kExitBlowup;
    }

    const std::filesystem::path dir(spec.output_dir);
    {
        auto os = io::open_out(dir / "ensemble_paths.csv");
        os << "member,seed,t_stop,L,sup_f,reason\n";
        for (const auto& m : out.members) {
            os << m.index << ',' << m.seed << ',' << io::format_double(m.t_stop) << ',' << io::format_double(m.L)
               << ',' << io::format_double(m.sup_f) << ',' << to_string(m.reason) << '\n';
        }
    }
    write_summary_csv(dir / "ensemble_summary.csv", out.summary);
    return out;
}

}  // namespace stocsf
