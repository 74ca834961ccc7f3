#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"

namespace stocsf {

/// Scalar Brownian motion sampled on a uniform grid.
///
/// `increments[k]` drives step k; `W[k]` is the value at time k*base_dt with
/// W[0] = 0. For a freshly sampled path W is the running sum of the
/// increments. A coarsened path subsamples W and takes increments as
/// differences of the subsampled values, so W agrees exactly with the
/// fine path at shared grid times.
struct BrownianPath {
    std::uint64_t seed = 0;
    double base_dt = 0.0;
    std::vector<double> increments;
    std::vector<double> W;

    std::size_t count() const { return increments.size(); }
    double final_time() const { return base_dt * static_cast<double>(count()); }

    friend bool operator==(const BrownianPath&, const BrownianPath&) = default;
};

/// Version tag of the Gaussian generator below. Paths are reproducible
/// from (seed, base_dt, count) for a fixed version.
inline constexpr int kNoiseAlgorithmVersion = 1;

namespace detail {

/// Uniform in (0, 1], 53 random bits.
inline double open_unit(std::mt19937_64& eng) {
    return (static_cast<double>(eng() >> 11) + 1.0) * 0x1.0p-53;
}

/// Uniform in [0, 1), 53 random bits.
inline double closed_unit(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Standard normals from std::mt19937_64 via the Box-Muller transform.
/// Each pair of engine outputs (u1 in (0,1], u2 in [0,1)) yields the pair
/// sqrt(-2 ln u1) * (cos 2 pi u2, sin 2 pi u2), emitted in that order.
inline std::vector<double> standard_normals(std::uint64_t seed, std::size_t count) {
    std::mt19937_64 eng(seed);
    std::vector<double> z;
    z.reserve(count + 1);
    while (z.size() < count) {
        const double u1 = detail::open_unit(eng);
        const double u2 = detail::closed_unit(eng);
        const double rad = std::sqrt(-2.0 * std::log(u1));
        z.push_back(rad * std::cos(kTwoPi * u2));
        z.push_back(rad * std::sin(kTwoPi * u2));
    }
    z.resize(count);
    return z;
}

namespace detail {

inline std::vector<double> running_sum(const std::vector<double>& inc) {
    std::vector<double> W(inc.size() + 1, 0.0);
    for (std::size_t k = 0; k < inc.size(); ++k) W[k + 1] = W[k] + inc[k];
    return W;
}

}  // namespace detail

inline BrownianPath sample_path(std::uint64_t seed, double base_dt, std::int64_t count) {
    if (!(base_dt > 0.0) || !std::isfinite(base_dt)) {
        throw InvalidInput("base_dt must be positive");
    }
    if (count < 1) throw InvalidInput("increment count must be at least 1");

    BrownianPath path;
    path.seed = seed;
    path.base_dt = base_dt;
    path.increments = standard_normals(seed, static_cast<std::size_t>(count));
    const double scale = std::sqrt(base_dt);
    for (double& v : path.increments) v *= scale;
    path.W = detail::running_sum(path.increments);
    return path;
}

/// Block-sums increments in groups of `factor`.
inline BrownianPath coarsen(const BrownianPath& path, std::int64_t factor) {
    if (factor < 1) throw InvalidInput("coarsening factor must be positive");
    const auto f = static_cast<std::size_t>(factor);
    if (path.count() % f != 0) {
        throw InvalidInput("coarsening factor " + std::to_string(factor) +
                           " does not divide increment count " + std::to_string(path.count()));
    }
    if (f == 1) return path;

    BrownianPath coarse;
    coarse.seed = path.seed;
    coarse.base_dt = path.base_dt * static_cast<double>(f);
    const std::size_t n = path.count() / f;
    coarse.W.resize(n + 1);
    coarse.increments.resize(n);
    for (std::size_t j = 0; j <= n; ++j) coarse.W[j] = path.W[j * f];
    for (std::size_t j = 0; j < n; ++j) coarse.increments[j] = coarse.W[j + 1] - coarse.W[j];
    return coarse;
}

/// First `count` increments of a path.
inline BrownianPath prefix(const BrownianPath& path, std::size_t count) {
    if (count > path.count()) throw InvalidInput("prefix longer than path");
    BrownianPath out;
    out.seed = path.seed;
    out.base_dt = path.base_dt;
    out.increments.assign(path.increments.begin(), path.increments.begin() + static_cast<std::ptrdiff_t>(count));
    out.W.assign(path.W.begin(), path.W.begin() + static_cast<std::ptrdiff_t>(count + 1));
    return out;
}

// Binary increment dump: "BMPATH01", seed (u64), count (u64), then count
// little-endian IEEE-754 doubles.

inline constexpr char kPathMagic[8] = {'B', 'M', 'P', 'A', 'T', 'H', '0', '1'};

namespace detail {

template <typename T>
void put_le(std::ostream& os, T value) {
    static_assert(sizeof(T) == 8);
    std::uint64_t bits;
    std::memcpy(&bits, &value, 8);
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(bits >> (8 * i));
    os.write(reinterpret_cast<const char*>(buf), 8);
}

template <typename T>
T get_le(std::istream& is) {
    static_assert(sizeof(T) == 8);
    unsigned char buf[8];
    if (!is.read(reinterpret_cast<char*>(buf), 8)) throw InvalidInput("truncated path file");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    T value;
    std::memcpy(&value, &bits, 8);
    return value;
}

}  // namespace detail

inline void write_path(std::ostream& os, const BrownianPath& path) {
    os.write(kPathMagic, sizeof kPathMagic);
    detail::put_le<std::uint64_t>(os, path.seed);
    detail::put_le<std::uint64_t>(os, static_cast<std::uint64_t>(path.count()));
    for (double v : path.increments) detail::put_le<double>(os, v);
}

/// The dump does not carry the step size; the caller supplies it.
inline BrownianPath read_path(std::istream& is, double base_dt) {
    char magic[8];
    if (!is.read(magic, 8) || std::memcmp(magic, kPathMagic, 8) != 0) {
        throw InvalidInput("not a Brownian path dump (bad magic)");
    }
    if (!(base_dt > 0.0)) throw InvalidInput("base_dt must be positive");
    BrownianPath path;
    path.seed = detail::get_le<std::uint64_t>(is);
    const auto count = detail::get_le<std::uint64_t>(is);
    path.base_dt = base_dt;
    path.increments.resize(count);
    for (auto& v : path.increments) v = detail::get_le<double>(is);
    path.W = detail::running_sum(path.increments);
    return path;
}

inline void save_path(const std::string& filename, const BrownianPath& path) {
    std::ofstream os(filename, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + filename + " for writing");
    write_path(os, path);
}

inline BrownianPath load_path(const std::string& filename, double base_dt) {
    std::ifstream is(filename, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + filename);
    return read_path(is, base_dt);
}

}  // namespace stocsf
