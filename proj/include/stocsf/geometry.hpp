#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace stocsf {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Lengths below this are treated as degenerate.
inline constexpr double kMinLength = 1e-12;

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
    friend bool operator==(const Point2&, const Point2&) = default;
};

inline double norm(Point2 p) { return std::hypot(p.x, p.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

/// Planar polyline. When closed, the closing point is not duplicated.
struct Curve {
    std::vector<Point2> points;
    bool closed = true;
};

/// Curvature sampled on the uniform grid r_j = j/N of the unit torus,
/// together with the total length L and the time t.
///
/// The physical curvature at arclength s is k(s) = f(s/L).
struct CurvatureState {
    std::vector<double> f;
    double L = 1.0;
    double t = 0.0;

    std::size_t size() const { return f.size(); }
    double dr() const { return 1.0 / static_cast<double>(f.size()); }
    double r(std::size_t j) const { return static_cast<double>(j) * dr(); }

    friend bool operator==(const CurvatureState&, const CurvatureState&) = default;
};

inline constexpr std::size_t kMinGrid = 8;

inline void validate(const CurvatureState& s) {
    if (s.f.size() < kMinGrid) {
        throw InvalidInput("curvature state needs at least " + std::to_string(kMinGrid) +
                           " grid points, got " + std::to_string(s.f.size()));
    }
    if (!(s.L > 0.0)) throw InvalidInput("curvature state length must be positive");
    if (!(s.t >= 0.0)) throw InvalidInput("curvature state time must be nonnegative");
}

inline bool all_finite(const CurvatureState& s) {
    return std::isfinite(s.L) && std::isfinite(s.t) &&
           std::all_of(s.f.begin(), s.f.end(), [](double v) { return std::isfinite(v); });
}

/// Rectangle-rule mean of f over the torus.
inline double mean(std::span<const double> f) {
    double acc = 0.0;
    for (double v : f) acc += v;
    return acc / static_cast<double>(f.size());
}

/// Rectangle-rule value of the integral of f^2 over the torus.
inline double integral_of_square(std::span<const double> f) {
    double acc = 0.0;
    for (double v : f) acc += v * v;
    return acc / static_cast<double>(f.size());
}

inline double sup_abs(std::span<const double> f) {
    double m = 0.0;
    for (double v : f) m = std::max(m, std::abs(v));
    return m;
}

/// Signed shoelace area; positive for counterclockwise traversal.
inline double enclosed_area(const Curve& curve) {
    if (!curve.closed) throw InvalidInput("enclosed_area requires a closed curve");
    const auto& p = curve.points;
    const std::size_t n = p.size();
    if (n < 3) throw InvalidInput("enclosed_area requires at least 3 points");
    double twice = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& a = p[i];
        const Point2& b = p[(i + 1) % n];
        twice += a.x * b.y - b.x * a.y;
    }
    return 0.5 * twice;
}

/// Polygonal arclength, including the closing edge when the curve is closed.
inline double polygon_length(const Curve& curve) {
    const auto& p = curve.points;
    double len = 0.0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) len += distance(p[i], p[i + 1]);
    if (curve.closed && p.size() > 1) len += distance(p.back(), p.front());
    return len;
}

namespace detail {

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
    a = std::remainder(a, kTwoPi);
    if (a <= -kPi) a += kTwoPi;
    return a;
}

/// Periodic linear interpolation of grid samples f_j at r_j = j/N.
inline double interpolate_periodic(std::span<const double> f, double r) {
    const auto n = static_cast<double>(f.size());
    double x = r * n;
    x -= n * std::floor(x / n);
    auto j = static_cast<std::size_t>(x);
    if (j >= f.size()) j = f.size() - 1;
    const double w = x - static_cast<double>(j);
    return (1.0 - w) * f[j] + w * f[(j + 1) % f.size()];
}

}  // namespace detail

/// Extracts a CurvatureState from a closed counterclockwise polygon.
///
/// The polygon is resampled at N stations equally spaced in polygonal
/// arclength (linear interpolation along edges). f_j is the turning angle
/// between the chords entering and leaving station j divided by the
/// station spacing L/N. Turning angles are taken in (-pi, pi], so the
/// total turning L * mean(f) is an exact multiple of 2*pi for simple
/// polygons.
inline CurvatureState curvature_from_curve(const Curve& curve, std::size_t N) {
    const auto& p = curve.points;
    if (!curve.closed) throw InvalidInput("curvature_from_curve requires a closed curve");
    if (p.size() < 3) throw InvalidInput("curve needs at least 3 points");
    if (N < kMinGrid) throw InvalidInput("grid size must be at least 8");

    const std::size_t n = p.size();
    std::vector<double> cumulative(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double edge = distance(p[i], p[(i + 1) % n]);
        if (!(edge > 0.0)) {
            throw InvalidInput("curve has a zero-length edge at point " + std::to_string(i));
        }
        cumulative[i + 1] = cumulative[i] + edge;
    }
    const double L = cumulative[n];
    if (!(L >= kMinLength)) throw InvalidInput("curve length below 1e-12");
    if (!(enclosed_area(curve) > 0.0)) {
        throw InvalidInput("curve must be traversed counterclockwise");
    }

    const double h = L / static_cast<double>(N);
    std::vector<Point2> stations(N);
    std::size_t edge = 0;
    for (std::size_t j = 0; j < N; ++j) {
        const double s = static_cast<double>(j) * h;
        while (edge + 1 < n && cumulative[edge + 1] <= s) ++edge;
        const double w = (s - cumulative[edge]) / (cumulative[edge + 1] - cumulative[edge]);
        const Point2& a = p[edge];
        const Point2& b = p[(edge + 1) % n];
        stations[j] = a + w * (b - a);
    }

    std::vector<double> chord_angle(N);
    for (std::size_t j = 0; j < N; ++j) {
        const Point2 d = stations[(j + 1) % N] - stations[j];
        if (!(norm(d) > 0.0)) throw InvalidInput("resampled curve has coincident stations");
        chord_angle[j] = std::atan2(d.y, d.x);
    }

    CurvatureState state;
    state.L = L;
    state.t = 0.0;
    state.f.resize(N);
    for (std::size_t j = 0; j < N; ++j) {
        const double prev = chord_angle[(j + N - 1) % N];
        state.f[j] = detail::wrap_angle(chord_angle[j] - prev) / h;
    }
    return state;
}

/// Integrates the Frenet relations theta' = k, gamma' = (cos theta, sin theta)
/// with the composite trapezoid rule at M+1 equally spaced arclength
/// stations on [0, L]. Curvature between grid samples is linearly
/// interpolated. The result is an open polyline; closure is not imposed.
inline Curve reconstruct_curve(const CurvatureState& state, Point2 start_point,
                               double start_angle, std::size_t M) {
    validate(state);
    if (M < state.size()) throw InvalidInput("output resolution M must be at least N");

    const double h = state.L / static_cast<double>(M);
    std::vector<double> k(M + 1);
    for (std::size_t i = 0; i <= M; ++i) {
        k[i] = detail::interpolate_periodic(state.f, static_cast<double>(i) / static_cast<double>(M));
    }

    Curve out;
    out.closed = false;
    out.points.resize(M + 1);
    out.points[0] = start_point;
    double theta = start_angle;
    double c_prev = std::cos(theta);
    double s_prev = std::sin(theta);
    Point2 pos = start_point;
    for (std::size_t i = 1; i <= M; ++i) {
        theta += 0.5 * h * (k[i - 1] + k[i]);
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        pos.x += 0.5 * h * (c_prev + c);
        pos.y += 0.5 * h * (s_prev + s);
        out.points[i] = pos;
        c_prev = c;
        s_prev = s;
    }
    return out;
}

/// (1/2pi) times the integral of k over the curve, i.e. L * mean(f) / 2pi.
inline double turning_number(const CurvatureState& state) {
    validate(state);
    return state.L * mean(state.f) / kTwoPi;
}

/// Endpoint gap of the reconstructed curve (origin, angle 0, 4N stations),
/// normalized by L.
inline double closure_defect(const CurvatureState& state) {
    const Curve c = reconstruct_curve(state, Point2{}, 0.0, 4 * state.size());
    return distance(c.points.front(), c.points.back()) / state.L;
}

}  // namespace stocsf
