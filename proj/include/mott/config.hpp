#pragma once

// Plain-text run configuration (INI syntax, one section per concern):
//
//   [detector]
//   n_spins = 4
//   spacing = 0.1        ; or: positions = 0, 0.1, 0.25, 0.3
//   offset  = 0
//   beta    = 0.5        ; scalar, broadcast to every spin, or one value per spin
//   gamma   = 3
//   epsilon = 0.01
//
//   [energy]
//   k0 = 3.14159         ; or: E = 9.8696
//
//   [grid]  x_min, x_max, n_points
//   [packet] center, width, wavenumber, mode = twin | right | left
//   [run]   dt, steps, sample_every, snapshot_every
//   [sweep] see sweep.hpp

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mott/channel_space.hpp"
#include "mott/wave_packet.hpp"

namespace mott {

using ConfigTree = boost::property_tree::ptree;

namespace detail {

// read_ini keeps "value ; note" verbatim; drop the trailing comment.
inline void strip_inline_comments(ConfigTree& tree) {
    for (auto& [key, node] : tree) {
        auto v = node.data();
        if (const auto pos = v.find_first_of(";#"); pos != std::string::npos) {
            v.erase(pos);
            while (!v.empty() && (v.back() == ' ' || v.back() == '\t')) v.pop_back();
            node.data() = v;
        }
        strip_inline_comments(node);
    }
}

}  // namespace detail

inline ConfigTree parse_config_stream(std::istream& in, const std::string& what) {
    ConfigTree tree;
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ptree_error& e) {
        throw ConfigError("cannot parse " + what + ": " + e.what());
    }
    detail::strip_inline_comments(tree);
    return tree;
}

inline ConfigTree read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config: " + path);
    return parse_config_stream(in, path);
}

inline ConfigTree parse_config(const std::string& text) {
    std::istringstream in(text);
    return parse_config_stream(in, "config");
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline double parse_number(const std::string& text, const std::string& key) {
    const std::string t = trim(text);
    // Convenience for exact table parameters such as 400/3.
    if (const auto slash = t.find('/'); slash != std::string::npos) {
        const double v = parse_number(t.substr(0, slash), key) / parse_number(t.substr(slash + 1), key);
        if (!std::isfinite(v)) throw ConfigError("'" + key + "': '" + t + "' is not finite");
        return v;
    }
    if (t == "pi") return std::numbers::pi;
    try {
        std::size_t used = 0;
        const double v = std::stod(t, &used);
        if (used != t.size()) throw std::invalid_argument(t);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("'" + key + "': cannot parse number '" + t + "'");
    }
}

/// Comma-separated list; linspace(a, b, n) expands to n evenly spaced values.
inline std::vector<double> parse_list(const std::string& text, const std::string& key) {
    std::string t = trim(text);
    std::vector<double> out;
    if (t.rfind("linspace(", 0) == 0 && t.back() == ')') {
        const auto args = parse_list(t.substr(9, t.size() - 10), key);
        if (args.size() != 3 || args[2] < 1 || args[2] != std::floor(args[2]))
            throw ConfigError("'" + key + "': linspace needs (start, stop, count)");
        const int n = static_cast<int>(args[2]);
        for (int i = 0; i < n; ++i) out.push_back(n == 1 ? args[0] : args[0] + (args[1] - args[0]) * i / (n - 1));
        return out;
    }
    std::istringstream in(t);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (trim(item).empty()) throw ConfigError("'" + key + "': empty list entry");
        out.push_back(parse_number(item, key));
    }
    if (out.empty()) throw ConfigError("'" + key + "': empty list");
    return out;
}

inline std::optional<std::string> get_string(const ConfigTree& tree, const std::string& path) {
    if (auto v = tree.get_optional<std::string>(path)) return trim(*v);
    return std::nullopt;
}

inline double require_number(const ConfigTree& tree, const std::string& path) {
    const auto v = get_string(tree, path);
    if (!v) throw ConfigError("missing required key '" + path + "'");
    return parse_number(*v, path);
}

inline double number_or(const ConfigTree& tree, const std::string& path, double fallback) {
    const auto v = get_string(tree, path);
    return v ? parse_number(*v, path) : fallback;
}

inline int require_int(const ConfigTree& tree, const std::string& path) {
    const double v = require_number(tree, path);
    if (v != std::floor(v)) throw ConfigError("'" + path + "' must be an integer");
    return static_cast<int>(v);
}

inline int int_or(const ConfigTree& tree, const std::string& path, int fallback) {
    return get_string(tree, path) ? require_int(tree, path) : fallback;
}

namespace detail {

inline std::vector<double> broadcast(const ConfigTree& tree, const std::string& path, int n, double fallback) {
    const auto v = get_string(tree, path);
    if (!v) return std::vector<double>(static_cast<std::size_t>(n), fallback);
    auto values = parse_list(*v, path);
    if (values.size() == 1) return std::vector<double>(static_cast<std::size_t>(n), values[0]);
    if (static_cast<int>(values.size()) != n)
        throw ConfigError("'" + path + "' needs 1 or " + std::to_string(n) + " values");
    return values;
}

}  // namespace detail

/// Detector from the [detector] section.
inline DetectorConfig detector_from_config(const ConfigTree& tree, const std::string& section = "detector") {
    const std::string p = section + ".";
    std::vector<double> positions;
    if (const auto pos = get_string(tree, p + "positions")) {
        positions = parse_list(*pos, p + "positions");
        if (const auto n = get_string(tree, p + "n_spins"); n && require_int(tree, p + "n_spins") != static_cast<int>(positions.size()))
            throw ConfigError("n_spins does not match the number of positions");
    } else {
        const int n = require_int(tree, p + "n_spins");
        if (n < 0) throw ConfigError("n_spins must be non-negative");
        const double spacing = n > 1 ? require_number(tree, p + "spacing") : number_or(tree, p + "spacing", 1.0);
        const double offset = number_or(tree, p + "offset", 0.0);
        for (int i = 0; i < n; ++i) positions.push_back(offset + i * spacing);
    }
    const int n = static_cast<int>(positions.size());
    return {std::move(positions), detail::broadcast(tree, p + "beta", n, 0.0), detail::broadcast(tree, p + "gamma", n, 0.0),
            detail::broadcast(tree, p + "epsilon", n, 0.0)};
}

/// k0 from [energy] k0 or E.
inline double k0_from_config(const ConfigTree& tree) {
    const bool has_k = get_string(tree, "energy.k0").has_value();
    const bool has_e = get_string(tree, "energy.E").has_value();
    if (has_k == has_e) throw ConfigError("[energy] needs exactly one of k0 or E");
    const double k0 = has_k ? require_number(tree, "energy.k0") : std::sqrt(require_number(tree, "energy.E"));
    if (!(k0 > 0.0)) throw ConfigError("k0 must be positive");
    return k0;
}

inline Grid grid_from_config(const ConfigTree& tree) {
    return {require_number(tree, "grid.x_min"), require_number(tree, "grid.x_max"), require_int(tree, "grid.n_points")};
}

inline PacketSpec packet_from_config(const ConfigTree& tree) {
    PacketSpec p;
    p.center = number_or(tree, "packet.center", 0.0);
    p.width = require_number(tree, "packet.width");
    p.wavenumber = require_number(tree, "packet.wavenumber");
    const std::string mode = get_string(tree, "packet.mode").value_or("twin");
    if (mode == "twin" || mode == "double") p.mode = PacketMode::twin;
    else if (mode == "right") p.mode = PacketMode::right;
    else if (mode == "left") p.mode = PacketMode::left;
    else throw ConfigError("packet.mode must be twin, right or left");
    return p;
}

/// 64-bit FNV-1a over the IEEE bit patterns of a sequence of doubles.
inline std::uint64_t fnv1a(const std::vector<double>& values, std::uint64_t h = 14695981039346656037ull) {
    for (double v : values) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        for (int b = 0; b < 8; ++b) {
            h ^= (bits >> (8 * b)) & 0xffu;
            h *= 1099511628211ull;
        }
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

inline std::uint64_t detector_hash(const DetectorConfig& det) {
    auto h = fnv1a(det.positions());
    h = fnv1a(det.betas(), h);
    h = fnv1a(det.gammas(), h);
    return fnv1a(det.epsilons(), h);
}

/// SplitMix64: a fixed, portable generator, so seeded meshes are identical
/// on every platform and standard library.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

/// N sorted positions uniform on [lo, hi] subject to a minimum gap: draw N
/// order statistics on [0, hi - lo - (N-1) gap] and push spin n right by
/// (n-1) gap.
inline std::vector<double> random_uniform_positions(int n, double lo, double hi, double min_gap, std::uint64_t seed) {
    if (n < 1) throw ConfigError("random mesh needs at least one spin");
    if (!(min_gap > 0.0)) throw ConfigError("random mesh needs min_gap > 0");
    const double free = (hi - lo) - (n - 1) * min_gap;
    if (!(free >= 0.0)) throw ConfigError("interval too short for the requested spins and min_gap");
    SplitMix64 rng(seed);
    std::vector<double> u(static_cast<std::size_t>(n));
    for (auto& v : u) v = rng.uniform() * free;
    std::sort(u.begin(), u.end());
    for (int i = 0; i < n; ++i) u[static_cast<std::size_t>(i)] += lo + i * min_gap;
    return u;
}

}  // namespace mott
