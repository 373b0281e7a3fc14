#pragma once

// Parameter sweeps over stationary solves.
//
//   [sweep]
//   gamma = 0.5, 1, 2          ; axes, in the order listed; first axis varies slowest
//   n_spins = 2, 4
//   position_mode = random     ; regular (default) or random
//   interval = 0, 1            ; random mode: mesh support
//   min_gap = 0.01
//   replicates = 3
//
// Scalars outside the axes come from [detector] and [energy]. A random mesh
// for replicate r uses seed + r, so every row can be regenerated alone.

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "mott/config.hpp"
#include "mott/scattering.hpp"

namespace mott {

enum class PositionMode { regular, random_uniform };

struct SweepAxis {
    std::string name;
    std::vector<double> values;
};

struct SweepPoint {
    int n_spins = 1;
    double k0 = 1.0;
    double beta = 0.0;
    double gamma = 0.0;
    double epsilon = 0.0;
    double spacing = 0.1;
    double offset = 0.0;
    std::uint64_t seed = 0;
    int replicate = 0;
};

struct SweepSpec {
    SweepPoint defaults;
    std::vector<SweepAxis> axes;
    PositionMode position_mode = PositionMode::regular;
    double interval_lo = 0.0;
    double interval_hi = 1.0;
    double min_gap = 1e-3;
    int replicates = 1;

    std::size_t run_count() const {
        std::size_t n = static_cast<std::size_t>(replicates);
        for (const auto& a : axes) n *= a.values.size();
        return n;
    }
};

inline bool is_axis_name(const std::string& name) {
    for (const char* n : {"k0", "gamma", "beta", "epsilon", "n_spins", "spacing", "seed"})
        if (name == n) return true;
    return false;
}

namespace detail {

inline void set_axis_value(SweepPoint& p, const std::string& name, double v) {
    auto as_count = [&](double x, const char* what) {
        if (x != std::floor(x) || x < 0) throw ConfigError(std::string(what) + " axis values must be non-negative integers");
        return x;
    };
    if (name == "k0") p.k0 = v;
    else if (name == "gamma") p.gamma = v;
    else if (name == "beta") p.beta = v;
    else if (name == "epsilon") p.epsilon = v;
    else if (name == "spacing") p.spacing = v;
    else if (name == "n_spins") p.n_spins = static_cast<int>(as_count(v, "n_spins"));
    else if (name == "seed") p.seed = static_cast<std::uint64_t>(as_count(v, "seed"));
    else throw ConfigError("unknown sweep axis '" + name + "'");
}

}  // namespace detail

/// Run set in output order: Cartesian product of the axes (first axis
/// slowest), replicates innermost.
inline std::vector<SweepPoint> expand(const SweepSpec& spec) {
    if (spec.replicates < 1) throw ConfigError("replicates must be >= 1");
    std::vector<SweepPoint> out;
    out.reserve(spec.run_count());
    std::vector<std::size_t> idx(spec.axes.size(), 0);
    for (const auto& a : spec.axes)
        if (a.values.empty()) return out;
    while (true) {
        SweepPoint p = spec.defaults;
        for (std::size_t a = 0; a < spec.axes.size(); ++a) detail::set_axis_value(p, spec.axes[a].name, spec.axes[a].values[idx[a]]);
        for (int r = 0; r < spec.replicates; ++r) {
            p.replicate = r;
            out.push_back(p);
        }
        std::size_t a = spec.axes.size();
        while (a > 0) {
            --a;
            if (++idx[a] < spec.axes[a].values.size()) break;
            idx[a] = 0;
            if (a == 0) return out;
        }
        if (spec.axes.empty()) return out;
    }
}

inline SweepSpec sweep_from_config(const ConfigTree& tree, std::optional<std::uint64_t> seed_override = std::nullopt) {
    SweepSpec spec;
    auto& d = spec.defaults;
    d.n_spins = int_or(tree, "detector.n_spins", 1);
    d.spacing = number_or(tree, "detector.spacing", 0.1);
    d.offset = number_or(tree, "detector.offset", 0.0);
    d.beta = number_or(tree, "detector.beta", 0.0);
    d.gamma = number_or(tree, "detector.gamma", 0.0);
    d.epsilon = number_or(tree, "detector.epsilon", 0.0);
    if (get_string(tree, "energy.k0") || get_string(tree, "energy.E")) d.k0 = k0_from_config(tree);
    d.seed = static_cast<std::uint64_t>(int_or(tree, "sweep.seed_base", 0));
    if (seed_override) d.seed = *seed_override;

    if (const auto sweep = tree.get_child_optional("sweep")) {
        for (const auto& [key, node] : *sweep) {
            const std::string name = trim(key);
            const std::string value = trim(node.data());
            if (is_axis_name(name)) {
                spec.axes.push_back({name, parse_list(value, "sweep." + name)});
            } else if (name == "position_mode") {
                if (value == "regular") spec.position_mode = PositionMode::regular;
                else if (value == "random" || value == "random-uniform") spec.position_mode = PositionMode::random_uniform;
                else throw ConfigError("position_mode must be regular or random");
            } else if (name == "interval") {
                const auto iv = parse_list(value, "sweep.interval");
                if (iv.size() != 2 || !(iv[1] > iv[0])) throw ConfigError("interval needs lo, hi with hi > lo");
                spec.interval_lo = iv[0];
                spec.interval_hi = iv[1];
            } else if (name == "min_gap") {
                spec.min_gap = parse_number(value, "sweep.min_gap");
            } else if (name == "replicates") {
                spec.replicates = require_int(tree, "sweep.replicates");
            } else if (name != "seed_base") {
                throw ConfigError("unknown [sweep] key '" + name + "'");
            }
        }
    }
    if (seed_override)
        for (auto& a : spec.axes)
            if (a.name == "seed") throw ConfigError("--seed conflicts with a seed axis");
    return spec;
}

struct SweepRow {
    SweepPoint point;
    std::string geometry;  ///< spacing for regular meshes, rnd:<seed>:<hash> for random ones
    double P_gnd = 0.0, P_OS = 0.0, P_trk = 0.0, entropy = 0.0;
    double unitarity_defect = 0.0;
    double residual = 0.0;
    double wall_ms = 0.0;
    bool ok = false;
    std::string status;
};

inline std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline DetectorConfig detector_for(const SweepPoint& p, const SweepSpec& spec, std::string* geometry = nullptr) {
    if (spec.position_mode == PositionMode::regular) {
        if (geometry) *geometry = format_number(p.spacing);
        return DetectorConfig::regular(p.n_spins, p.spacing, p.beta, p.gamma, p.epsilon, p.offset);
    }
    const std::uint64_t seed = p.seed + static_cast<std::uint64_t>(p.replicate);
    auto y = random_uniform_positions(p.n_spins, spec.interval_lo, spec.interval_hi, spec.min_gap, seed);
    if (geometry) *geometry = "rnd:" + std::to_string(seed) + ":" + hex64(fnv1a(y));
    return DetectorConfig::uniform(std::move(y), p.beta, p.gamma, p.epsilon);
}

/// One stationary solve; failures are recorded in the row, never thrown.
inline SweepRow run_point(const SweepPoint& p, const SweepSpec& spec, const SolveOptions& opt = {}) {
    SweepRow row;
    row.point = p;
    const auto start = std::chrono::steady_clock::now();
    try {
        const auto det = detector_for(p, spec, &row.geometry);
        const auto sol = solve_scattering(det, p.k0, opt);
        const auto probs = aggregate_channels(channel_fluxes(sol), det.n_spins());
        row.P_gnd = probs.P_gnd;
        row.P_OS = probs.P_OS;
        row.P_trk = probs.P_trk;
        row.entropy = probs.spin_entropy;
        row.unitarity_defect = probs.unitarity_defect;
        row.residual = sol.residual;
        row.ok = probs.unitarity_defect < unitarity_rejection_threshold;
        row.status = row.ok ? "ok" : "failed: unitarity defect " + format_number(probs.unitarity_defect);
    } catch (const std::exception& e) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        row.P_gnd = row.P_OS = row.P_trk = row.entropy = row.unitarity_defect = row.residual = nan;
        row.ok = false;
        row.status = std::string("failed: ") + e.what();
    }
    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    for (auto& ch : row.status)
        if (ch == ',' || ch == '\n') ch = ';';
    return row;
}

inline constexpr const char* sweep_csv_header =
    "n_spins,k0,beta,gamma,epsilon,spacing_or_positions_hash,P_gnd,P_OS,P_trk,entropy,unitarity_defect,residual,"
    "wall_ms,status";

/// wall_ms is written as NA unless timing is requested, which keeps seeded
/// runs byte-identical.
inline std::string format_row(const SweepRow& r, bool timing) {
    std::string s;
    const auto& p = r.point;
    for (const auto& field : {std::to_string(p.n_spins), format_number(p.k0), format_number(p.beta), format_number(p.gamma),
                              format_number(p.epsilon), r.geometry, format_number(r.P_gnd), format_number(r.P_OS),
                              format_number(r.P_trk), format_number(r.entropy), format_number(r.unitarity_defect),
                              format_number(r.residual), timing ? format_number(r.wall_ms) : std::string("NA"), r.status}) {
        if (!s.empty()) s += ',';
        s += field;
    }
    return s;
}

struct SweepSummary {
    std::size_t rows = 0;
    std::size_t failed = 0;
};

/// Runs every point on `jobs` workers; rows are written in expand() order
/// as soon as all earlier rows are done.
inline SweepSummary run_sweep(const SweepSpec& spec, std::ostream& out, int jobs = 1, bool timing = false,
                              const SolveOptions& opt = {}) {
    const auto points = expand(spec);
    std::vector<std::optional<SweepRow>> done(points.size());
    std::mutex mu;
    std::condition_variable cv;
    std::atomic<std::size_t> next{0};

    out << "# mottsim sweep, format 1\n" << sweep_csv_header << '\n';

    auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            auto row = run_point(points[i], spec, opt);
            {
                std::lock_guard lock(mu);
                done[i] = std::move(row);
            }
            cv.notify_one();
        }
    };

    const int n_workers = std::max(1, jobs);
    std::vector<std::jthread> pool;
    if (n_workers > 1)
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);

    SweepSummary summary;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (n_workers == 1) {
            done[i] = run_point(points[i], spec, opt);
        } else {
            std::unique_lock lock(mu);
            cv.wait(lock, [&] { return done[i].has_value(); });
        }
        out << format_row(*done[i], timing) << '\n';
        out.flush();
        ++summary.rows;
        if (!done[i]->ok) ++summary.failed;
        done[i].reset();
    }
    return summary;
}

}  // namespace mott
