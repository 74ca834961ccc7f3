#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "blowup.hpp"
#include "dynamics.hpp"
#include "errors.hpp"
#include "flow.hpp"
#include "geometry.hpp"
#include "oracles.hpp"

namespace stocsf::io {

using json = nlohmann::json;

/// Shortest decimal representation that round-trips.
inline std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw std::runtime_error("cannot format number");
    return std::string(buf, end);
}

inline double parse_double(std::string_view text, std::string_view what) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw InvalidInput("invalid number '" + std::string(text) + "' for " + std::string(what));
    }
    return v;
}

inline std::ofstream open_out(const std::filesystem::path& p) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + p.string() + " for writing");
    return os;
}

// ---------------------------------------------------------------------------
// Curves: CSV with header "x,y", closing point not duplicated.

inline void write_curve_csv(std::ostream& os, const Curve& c) {
    os << "x,y\n";
    for (const auto& p : c.points) os << format_double(p.x) << ',' << format_double(p.y) << '\n';
}

inline Curve read_curve_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw InvalidInput("empty curve file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "x,y") throw InvalidInput("curve file must start with header 'x,y'");
    Curve c;
    c.closed = true;
    std::size_t row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw InvalidInput("curve file row " + std::to_string(row) + " lacks a comma");
        const std::string_view sv(line);
        c.points.push_back({parse_double(sv.substr(0, comma), "x"), parse_double(sv.substr(comma + 1), "y")});
    }
    return c;
}

inline Curve load_curve(const std::filesystem::path& p) {
    std::ifstream is(p);
    if (!is) throw InvalidInput("cannot open curve file " + p.string());
    return read_curve_csv(is);
}

// ---------------------------------------------------------------------------
// CurvatureState as {"t": ..., "L": ..., "f": [...]}

inline json state_to_json(const CurvatureState& s) { return json{{"t", s.t}, {"L", s.L}, {"f", s.f}}; }

inline CurvatureState state_from_json(const json& j) {
    CurvatureState s;
    s.t = j.at("t").get<double>();
    s.L = j.at("L").get<double>();
    s.f = j.at("f").get<std::vector<double>>();
    return s;
}

// ---------------------------------------------------------------------------
// FlowConfig

inline json config_to_json(const FlowConfig& c) {
    json j{{"sigma", c.sigma},
           {"grid", c.N},
           {"dt", c.dt},
           {"t_end", c.t_end},
           {"scheme", std::string(to_string(c.scheme))},
           {"seed", c.seed}};
    j["trunc_n"] = c.trunc_n ? json(*c.trunc_n) : json(nullptr);
    j["blowup_f_max"] = c.blowup_f_max ? json(*c.blowup_f_max) : json(nullptr);
    j["blowup_l_min"] = c.blowup_L_min ? json(*c.blowup_L_min) : json(nullptr);
    j["blowup_l_max"] = c.blowup_L_max ? json(*c.blowup_L_max) : json(nullptr);
    return j;
}

inline FlowConfig config_from_json(const json& j) {
    FlowConfig c;
    c.sigma = j.at("sigma").get<double>();
    c.N = j.at("grid").get<std::size_t>();
    c.dt = j.at("dt").get<double>();
    c.t_end = j.at("t_end").get<double>();
    c.scheme = parse_scheme(j.at("scheme").get<std::string>());
    c.seed = j.at("seed").get<std::uint64_t>();
    if (!j.at("trunc_n").is_null()) c.trunc_n = j.at("trunc_n").get<int>();
    if (!j.at("blowup_f_max").is_null()) c.blowup_f_max = j.at("blowup_f_max").get<double>();
    if (!j.at("blowup_l_min").is_null()) c.blowup_L_min = j.at("blowup_l_min").get<double>();
    if (!j.at("blowup_l_max").is_null()) c.blowup_L_max = j.at("blowup_l_max").get<double>();
    return c;
}

// ---------------------------------------------------------------------------
// Trajectories: JSON-Lines. Line 1 is a header with the config, then one
// line per snapshot, then a footer with the stopping reason. Wall-clock
// time is kept out of this file so identical runs give identical bytes.

inline json snapshot_to_json(const Snapshot& s) {
    const auto& d = s.diagnostics;
    return json{{"type", "snapshot"},
                {"step", s.step},
                {"t", s.t},
                {"L", s.L},
                {"W", s.W},
                {"f", s.f},
                {"diagnostics",
                 {{"turning_number", d.turning_number},
                  {"f_sq_integral", d.f_sq_integral},
                  {"closure_defect", d.closure_defect},
                  {"exact_length_residual", d.exact_length_residual},
                  {"sup_f", d.sup_f}}}};
}

inline Snapshot snapshot_from_json(const json& j) {
    Snapshot s;
    s.step = j.at("step").get<std::size_t>();
    s.t = j.at("t").get<double>();
    s.L = j.at("L").get<double>();
    s.W = j.at("W").get<double>();
    s.f = j.at("f").get<std::vector<double>>();
    const auto& d = j.at("diagnostics");
    s.diagnostics.turning_number = d.at("turning_number").get<double>();
    s.diagnostics.f_sq_integral = d.at("f_sq_integral").get<double>();
    s.diagnostics.closure_defect = d.at("closure_defect").get<double>();
    s.diagnostics.exact_length_residual = d.at("exact_length_residual").get<double>();
    s.diagnostics.sup_f = d.at("sup_f").get<double>();
    return s;
}

inline void write_trajectory(std::ostream& os, const TrajectoryRecord& rec) {
    json header{{"type", "header"},
                {"config", config_to_json(rec.config)},
                {"seed", rec.seed()},
                {"noise_algorithm", kNoiseAlgorithmVersion},
                {"warnings", rec.warnings}};
    os << header.dump() << '\n';
    for (const auto& s : rec.snapshots) os << snapshot_to_json(s).dump() << '\n';
    json footer{{"type", "footer"}, {"stop_reason", std::string(to_string(rec.reason))}, {"stop_time", rec.stop_time}};
    os << footer.dump() << '\n';
}

inline TrajectoryRecord read_trajectory(std::istream& is) {
    TrajectoryRecord rec;
    std::string line;
    bool have_header = false, have_footer = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        const auto type = j.at("type").get<std::string>();
        if (type == "header") {
            rec.config = config_from_json(j.at("config"));
            rec.warnings = j.at("warnings").get<std::vector<std::string>>();
            have_header = true;
        } else if (type == "snapshot") {
            rec.snapshots.push_back(snapshot_from_json(j));
        } else if (type == "footer") {
            rec.reason = parse_stop_reason(j.at("stop_reason").get<std::string>());
            rec.stop_time = j.at("stop_time").get<double>();
            have_footer = true;
        } else {
            throw InvalidInput("unknown trajectory line type '" + type + "'");
        }
    }
    if (!have_header || !have_footer) throw InvalidInput("trajectory file is missing its header or footer");
    return rec;
}

inline TrajectoryRecord load_trajectory(const std::filesystem::path& p) {
    std::ifstream is(p);
    if (!is) throw InvalidInput("cannot open trajectory file " + p.string());
    return read_trajectory(is);
}

inline void write_diagnostics_csv(std::ostream& os, const TrajectoryRecord& rec) {
    os << "step,t,L,W,turning_number,f_sq_integral,closure_defect,exact_length_residual,sup_f\n";
    for (const auto& s : rec.snapshots) {
        const auto& d = s.diagnostics;
        os << s.step << ',' << format_double(s.t) << ',' << format_double(s.L) << ',' << format_double(s.W) << ','
           << format_double(d.turning_number) << ',' << format_double(d.f_sq_integral) << ','
           << format_double(d.closure_defect) << ',' << format_double(d.exact_length_residual) << ','
           << format_double(d.sup_f) << '\n';
    }
}

inline void write_order_csv(std::ostream& os, const OrderEstimate& est) {
    os << "dt,error\n";
    for (std::size_t i = 0; i < est.dts.size(); ++i) {
        os << format_double(est.dts[i]) << ',' << format_double(est.errors[i]) << '\n';
    }
}

/// Area-law residuals; labelled as an external oracle in the header comment.
inline void write_area_residual_csv(std::ostream& os, const std::vector<AreaResidual>& series) {
    os << "# external oracle (not from the curvature formulation): A(t) = A(0) - 2 pi t\n";
    os << "t,area,residual\n";
    for (const auto& r : series) {
        os << format_double(r.t) << ',' << format_double(r.area) << ',' << format_double(r.residual) << '\n';
    }
}

}  // namespace stocsf::io
