#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dynamics.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "io.hpp"

namespace stocsf {

/// Initial condition as given on the command line:
///   circle:R            round circle of radius R
///   ellipse:a,b         ellipse with semi-axes a, b
///   fourier:R:k,a[:k,a...]  f = 1/R + sum a cos(2 pi k r), L = 2 pi R
///   file:PATH           closed curve CSV ("x,y")
///   zero:L              f = 0 with length L
struct InitialCondition {
    enum class Kind { circle, ellipse, fourier, file, zero };
    Kind kind = Kind::circle;
    std::vector<double> params;
    std::vector<std::pair<int, double>> modes;
    std::string path;
    std::string text;
};

/// Points used to sample analytic ellipses before curvature extraction.
inline constexpr std::size_t kEllipseSamples = 4096;

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace detail

inline InitialCondition parse_initial(const std::string& text) {
    InitialCondition ic;
    ic.text = text;
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw InvalidInput("initial: expected kind:parameters, got '" + text + "'");
    const std::string kind = text.substr(0, colon);
    const std::string rest = text.substr(colon + 1);
    auto number = [](const std::string& s) { return io::parse_double(s, "initial"); };

    if (kind == "circle" || kind == "zero") {
        ic.kind = kind == "circle" ? InitialCondition::Kind::circle : InitialCondition::Kind::zero;
        ic.params = {number(rest)};
        if (!(ic.params[0] > 0.0)) throw InvalidInput("initial: " + kind + " size must be positive");
    } else if (kind == "ellipse") {
        ic.kind = InitialCondition::Kind::ellipse;
        const auto parts = detail::split(rest, ',');
        if (parts.size() != 2) throw InvalidInput("initial: ellipse expects a,b");
        ic.params = {number(parts[0]), number(parts[1])};
        if (!(ic.params[0] > 0.0 && ic.params[1] > 0.0)) throw InvalidInput("initial: ellipse axes must be positive");
    } else if (kind == "fourier") {
        ic.kind = InitialCondition::Kind::fourier;
        const auto parts = detail::split(rest, ':');
        ic.params = {number(parts[0])};
        if (!(ic.params[0] > 0.0)) throw InvalidInput("initial: fourier base radius must be positive");
        for (std::size_t i = 1; i < parts.size(); ++i) {
            const auto km = detail::split(parts[i], ',');
            if (km.size() != 2) throw InvalidInput("initial: fourier mode must be frequency,amplitude");
            const double k = number(km[0]);
            if (k != std::floor(k)) throw InvalidInput("initial: fourier frequency must be an integer");
            ic.modes.emplace_back(static_cast<int>(k), number(km[1]));
        }
    } else if (kind == "file") {
        ic.kind = InitialCondition::Kind::file;
        ic.path = rest;
        if (rest.empty()) throw InvalidInput("initial: file path is empty");
    } else {
        throw InvalidInput("initial: unknown kind '" + kind + "'");
    }
    return ic;
}

inline Curve sample_ellipse(double a, double b, std::size_t n) {
    Curve c;
    c.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
        c.points.push_back({a * std::cos(t), b * std::sin(t)});
    }
    return c;
}

inline CurvatureState build_initial_state(const InitialCondition& ic, std::size_t N) {
    CurvatureState s;
    switch (ic.kind) {
        case InitialCondition::Kind::circle:
            s = {std::vector<double>(N, 1.0 / ic.params[0]), kTwoPi * ic.params[0], 0.0};
            break;
        case InitialCondition::Kind::zero:
            s = {std::vector<double>(N, 0.0), ic.params[0], 0.0};
            break;
        case InitialCondition::Kind::ellipse:
            s = curvature_from_curve(sample_ellipse(ic.params[0], ic.params[1], kEllipseSamples), N);
            break;
        case InitialCondition::Kind::file:
            s = curvature_from_curve(io::load_curve(ic.path), N);
            break;
        case InitialCondition::Kind::fourier: {
            const double R = ic.params[0];
            s = {std::vector<double>(N, 1.0 / R), kTwoPi * R, 0.0};
            for (std::size_t j = 0; j < N; ++j) {
                const double r = static_cast<double>(j) / static_cast<double>(N);
                for (const auto& [k, a] : ic.modes) s.f[j] += a * std::cos(kTwoPi * k * r);
            }
            const double tn = turning_number(s);
            if (std::abs(tn - 1.0) > 1e-9) {
                throw InvalidInput("initial: fourier data has turning number " + std::to_string(tn) + ", expected 1");
            }
            break;
        }
    }
    validate(s);
    return s;
}

/// Everything a CLI invocation needs.
struct RunSpec {
    FlowConfig flow;
    InitialCondition initial;
    std::size_t snapshot_every = 0;
    std::string output_dir = ".";
    std::size_t ensemble = 0;
    bool write_curves = false;
};

inline constexpr const char* kOutputDirEnv = "STOCSF_OUTPUT_DIR";

namespace detail {

/// Canonical option names (flag spelling without dashes).
inline const std::vector<std::string>& option_names() {
    static const std::vector<std::string> names = {
        "initial", "sigma", "grid", "dt", "t-end", "scheme", "seed", "trunc-n", "blowup-f-max",
        "blowup-l-min", "blowup-l-max", "snapshot-every", "output-dir", "ensemble", "write-curves"};
    return names;
}

inline std::string canonical_key(std::string key) {
    for (char& c : key) {
        if (c == '_') c = '-';
    }
    if (key == "t_end") key = "t-end";
    return key;
}

inline std::string json_scalar_text(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
    if (v.is_number_float()) return io::format_double(v.get<double>());
    throw InvalidInput("config file values must be scalars");
}

inline double field_double(const std::map<std::string, std::string>& m, const std::string& key) {
    return io::parse_double(m.at(key), key);
}

inline long long field_integer(const std::map<std::string, std::string>& m, const std::string& key) {
    const std::string& s = m.at(key);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        // Accept integral floating values such as 1e4 or 128.0.
        const double d = io::parse_double(s, key);
        if (d != std::floor(d) || std::abs(d) > 9.0e15) throw InvalidInput(key + " must be an integer");
        return static_cast<long long>(d);
    }
    return v;
}

}  // namespace detail

/// Builds a RunSpec from option values (key = flag name without dashes).
/// Values from `file_values` are overridden by `flag_values`.
inline RunSpec resolve_config(const std::map<std::string, std::string>& file_values,
                              const std::map<std::string, std::string>& flag_values) {
    std::map<std::string, std::string> m;
    for (const auto& [k, v] : file_values) {
        const auto key = detail::canonical_key(k);
        const auto& names = detail::option_names();
        if (std::find(names.begin(), names.end(), key) == names.end()) {
            throw InvalidInput("config file: unknown field '" + k + "'");
        }
        m[key] = v;
    }
    for (const auto& [k, v] : flag_values) m[detail::canonical_key(k)] = v;

    RunSpec spec;
    auto& c = spec.flow;
    if (!m.count("initial")) throw InvalidInput("initial: an initial condition is required");
    if (m.count("sigma")) c.sigma = detail::field_double(m, "sigma");
    if (!(c.sigma >= 0.0) || !std::isfinite(c.sigma)) throw InvalidInput("sigma must be nonnegative");
    if (m.count("grid")) {
        const auto g = detail::field_integer(m, "grid");
        if (g < static_cast<long long>(kMinGrid)) throw InvalidInput("grid must be at least 8");
        c.N = static_cast<std::size_t>(g);
    }
    if (m.count("dt")) c.dt = detail::field_double(m, "dt");
    if (!(c.dt > 0.0)) throw InvalidInput("dt must be positive");
    if (m.count("t-end")) c.t_end = detail::field_double(m, "t-end");
    if (!(c.t_end > 0.0)) throw InvalidInput("t-end must be positive");
    if (m.count("scheme")) {
        try {
            c.scheme = parse_scheme(m.at("scheme"));
        } catch (const InvalidInput&) {
            throw InvalidInput("scheme must be one of euler_maruyama (em), heun_stratonovich (heun), imex, deterministic");
        }
    }
    if (m.count("seed")) {
        const auto s = detail::field_integer(m, "seed");
        if (s < 0) throw InvalidInput("seed must be nonnegative");
        c.seed = static_cast<std::uint64_t>(s);
    }
    if (m.count("trunc-n")) {
        const auto n = detail::field_integer(m, "trunc-n");
        if (n < 1) throw InvalidInput("trunc-n must be a positive integer");
        c.trunc_n = static_cast<int>(n);
    }
    if (m.count("blowup-f-max")) c.blowup_f_max = detail::field_double(m, "blowup-f-max");
    if (m.count("blowup-l-min")) c.blowup_L_min = detail::field_double(m, "blowup-l-min");
    if (m.count("blowup-l-max")) c.blowup_L_max = detail::field_double(m, "blowup-l-max");
    if (m.count("snapshot-every")) {
        const auto e = detail::field_integer(m, "snapshot-every");
        if (e < 1) throw InvalidInput("snapshot-every must be positive");
        spec.snapshot_every = static_cast<std::size_t>(e);
    }
    if (m.count("ensemble")) {
        const auto e = detail::field_integer(m, "ensemble");
        if (e < 1) throw InvalidInput("ensemble must be at least 1");
        spec.ensemble = static_cast<std::size_t>(e);
    }
    if (m.count("write-curves")) {
        const auto& w = m.at("write-curves");
        spec.write_curves = (w == "true" || w == "1");
    }
    if (m.count("output-dir")) {
        spec.output_dir = m.at("output-dir");
    } else if (const char* env = std::getenv(kOutputDirEnv); env && *env) {
        spec.output_dir = env;
    }
    spec.initial = parse_initial(m.at("initial"));
    validate(c);
    return spec;
}

inline std::map<std::string, std::string> read_config_file(const std::filesystem::path& p) {
    std::ifstream is(p);
    if (!is) throw InvalidInput("config: cannot open " + p.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput("config: " + std::string(e.what()));
    }
    if (!j.is_object()) throw InvalidInput("config: top level must be an object");
    std::map<std::string, std::string> out;
    for (const auto& [k, v] : j.items()) out[k] = detail::json_scalar_text(v);
    return out;
}

}  // namespace stocsf
