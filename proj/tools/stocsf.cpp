// Command-line front end: single runs, ensembles, convergence studies and
// oracle comparisons.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stocsf/cli.hpp"
#include "stocsf/commands.hpp"
#include "stocsf/io.hpp"
#include "stocsf/oracles.hpp"

namespace {

using namespace stocsf;

int do_run(const RunFlags& flags) {
    const RunSpec spec = resolve_flags(flags);
    if (spec.ensemble >= 1) {
        const auto res = ensemble_command(spec, spec.ensemble);
        std::size_t stopped = 0;
        for (const auto& m : res.members) stopped += m.reason != StopReason::completed;
        std::cout << "ensemble: " << res.members.size() << " paths, " << stopped << " stopped early; summary in "
                  << (std::filesystem::path(spec.output_dir) / "ensemble_summary.csv").string() << '\n';
        return res.exit_code;
    }
    const auto res = run_command(spec);
    for (const auto& w : res.record.warnings) std::cerr << "warning: " << w << '\n';
    const auto& last = res.record.final_snapshot();
    std::cout << "stop: " << to_string(res.record.reason) << " at t=" << res.record.stop_time << ", L=" << last.L
              << ", turning number " << last.diagnostics.turning_number << '\n';
    return res.exit_code;
}

int do_order(const RunFlags& flags, std::size_t seed_count, int refinements, int reference_halvings) {
    const RunSpec spec = resolve_flags(flags);
    const CurvatureState initial = build_initial_state(spec.initial, spec.flow.N);
    std::vector<std::uint64_t> seeds(seed_count);
    std::iota(seeds.begin(), seeds.end(), spec.flow.seed);
    const auto est = estimate_strong_order(initial, spec.flow, seeds, refinements, reference_halvings);
    auto os = io::open_out(std::filesystem::path(spec.output_dir) / "order.csv");
    io::write_order_csv(os, est);
    std::cout << "fitted order " << est.fitted_order << " (" << seeds.size() - est.excluded_seeds.size()
              << " paths used, " << est.excluded_seeds.size() << " excluded)\n";
    for (auto s : est.excluded_seeds) std::cout << "excluded seed " << s << '\n';
    return kExitCompleted;
}

int do_circle_check(const RunFlags& flags) {
    RunSpec spec = resolve_flags(flags);
    if (spec.initial.kind != InitialCondition::Kind::circle) throw InvalidInput("initial: circle-check needs circle:R");
    const double R0 = spec.initial.params[0];
    const auto steps = step_count(spec.flow);
    const BrownianPath fine = sample_path(spec.flow.seed, spec.flow.dt / kCircleRefinement,
                                          static_cast<std::int64_t>(steps * kCircleRefinement));
    const auto ref = circle_sde_reference(R0, spec.flow.sigma, fine, spec.flow.dt, spec.flow.t_end);
    const auto rec = run_flow(build_initial_state(spec.initial, spec.flow.N), spec.flow, fine, 1);
    auto os = io::open_out(std::filesystem::path(spec.output_dir) / "circle_check.csv");
    os << "t,L_pde,L_reference,relative_error\n";
    double worst = 0.0;
    for (const auto& s : rec.snapshots) {
        const auto& r = ref.at(s.step);
        const double rel = std::abs(s.L - r.L) / r.L;
        worst = std::max(worst, rel);
        os << io::format_double(s.t) << ',' << io::format_double(s.L) << ',' << io::format_double(r.L) << ','
           << io::format_double(rel) << '\n';
    }
    std::cout << "max relative length error vs circle reference: " << worst << '\n';
    return exit_code_for(rec);
}

int do_area_law(const std::string& trajectory, const std::string& out) {
    const auto rec = io::load_trajectory(trajectory);
    const auto series = deterministic_area_law(rec);
    auto os = io::open_out(out);
    io::write_area_residual_csv(os, series);
    double worst = 0.0;
    for (const auto& r : series) worst = std::max(worst, r.residual);
    std::cout << "max area-law residual (external oracle): " << worst << '\n';
    return kExitCompleted;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic curve shortening flow simulator"};
    app.require_subcommand(1);

    RunFlags run_flags, order_flags, circle_flags;
    auto* run = app.add_subcommand("run", "run one path (or an ensemble with --ensemble)");
    add_run_options(*run, run_flags);

    auto* order = app.add_subcommand("order", "estimate the strong convergence order");
    add_run_options(*order, order_flags);
    std::size_t seed_count = 8;
    int refinements = 4;
    int reference_halvings = kDefaultReferenceHalvings;
    order->add_option("--seeds", seed_count, "number of paths (seeds seed, seed+1, ...)");
    order->add_option("--refinements", refinements, "number of step sizes dt, dt/2, ...");
    order->add_option("--reference-halvings", reference_halvings, "extra halvings for the reference solution");

    auto* circle = app.add_subcommand("circle-check", "compare a circle run with the radius SDE reference");
    add_run_options(*circle, circle_flags);

    auto* area = app.add_subcommand("area-law", "area-law residuals of a sigma = 0 trajectory");
    std::string trajectory, area_out = "area_law.csv";
    area->add_option("trajectory", trajectory, "trajectory.jsonl")->required();
    area->add_option("--out", area_out, "output CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitError;
    }

    try {
        if (*run) return do_run(run_flags);
        if (*order) return do_order(order_flags, seed_count, refinements, reference_halvings);
        if (*circle) return do_circle_check(circle_flags);
        if (*area) return do_area_law(trajectory, area_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}
