#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "dynamics.hpp"
#include "geometry.hpp"

namespace stocsf {

enum class StopReason { completed, curvature_blowup, length_collapse, length_explosion };

inline std::string_view to_string(StopReason r) {
    switch (r) {
        case StopReason::completed: return "completed";
        case StopReason::curvature_blowup: return "curvature blow-up";
        case StopReason::length_collapse: return "length collapse";
        case StopReason::length_explosion: return "length explosion";
    }
    return "unknown";
}

inline StopReason parse_stop_reason(std::string_view s) {
    if (s == "completed") return StopReason::completed;
    if (s == "curvature blow-up") return StopReason::curvature_blowup;
    if (s == "length collapse") return StopReason::length_collapse;
    if (s == "length explosion") return StopReason::length_explosion;
    throw InvalidInput("unknown stop reason '" + std::string(s) + "'");
}

/// Finite-threshold surrogate of the stopping time: sup|f| above f_max, or L
/// outside (L_min, L_max). Length checks take precedence.
inline std::optional<StopReason> detect_blowup(const CurvatureState& state, const BlowupThresholds& th) {
    if (!(state.L > th.L_min)) return StopReason::length_collapse;
    if (!(state.L < th.L_max)) return StopReason::length_explosion;
    if (!(sup_abs(state.f) <= th.f_max)) return StopReason::curvature_blowup;
    return std::nullopt;
}

inline std::optional<StopReason> detect_blowup(const CurvatureState& state, const FlowConfig& config) {
    return detect_blowup(state, thresholds(config));
}

}  // namespace stocsf
