#pragma once

#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "config.hpp"

namespace stocsf {

/// Flag values collected by add_run_options; only flags actually given
/// end up in the map.
struct RunFlags {
    std::map<std::string, std::string> values;
    std::string config_file;
    bool write_curves = false;
    std::vector<std::pair<std::string, CLI::Option*>> options;
    CLI::Option* write_curves_flag = nullptr;

    std::map<std::string, std::string> given() const {
        std::map<std::string, std::string> out;
        for (const auto& [name, opt] : options) {
            if (opt->count() > 0) out[name] = values.at(name);
        }
        if (write_curves_flag && write_curves_flag->count() > 0) out["write-curves"] = "true";
        return out;
    }
};

inline void add_run_options(CLI::App& app, RunFlags& flags) {
    static const std::vector<std::pair<std::string, std::string>> described = {
        {"initial", "circle:R | ellipse:a,b | fourier:R:k,a[:k,a...] | file:PATH | zero:L"},
        {"sigma", "noise intensity (>= 0)"},
        {"grid", "number of grid points N (>= 8)"},
        {"dt", "time step"},
        {"t-end", "final time (rounded down to whole steps)"},
        {"scheme", "euler_maruyama|em, heun_stratonovich|heun, imex, deterministic"},
        {"seed", "Brownian path seed"},
        {"trunc-n", "truncation level n for the length cutoff"},
        {"blowup-f-max", "curvature sup-norm threshold"},
        {"blowup-l-min", "lower length threshold"},
        {"blowup-l-max", "upper length threshold"},
        {"snapshot-every", "snapshot cadence in steps"},
        {"output-dir", "output directory (default $STOCSF_OUTPUT_DIR or .)"},
        {"ensemble", "run this many paths with seeds seed+0, seed+1, ..."},
    };
    for (const auto& [name, help] : described) flags.values[name] = "";
    for (const auto& [name, help] : described) {
        flags.options.emplace_back(name, app.add_option("--" + name, flags.values[name], help));
    }
    flags.write_curves_flag = app.add_flag("--write-curves", flags.write_curves, "write reconstructed curve CSVs");
    app.add_option("--config", flags.config_file, "JSON config file; flags override its values");
}

inline RunSpec resolve_flags(const RunFlags& flags) {
    std::map<std::string, std::string> file_values;
    if (!flags.config_file.empty()) file_values = read_config_file(flags.config_file);
    return resolve_config(file_values, flags.given());
}

/// Parses run flags (argv without the program and subcommand names).
inline RunSpec parse_config(std::vector<std::string> args) {
    CLI::App app{"stocsf run"};
    RunFlags flags;
    add_run_options(app, flags);
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        throw InvalidInput(e.what());
    }
    return resolve_flags(flags);
}

}  // namespace stocsf
