#pragma once

// Published excitation probabilities for regularly spaced meshes, kept as
// printed (five significant figures), and a driver that recomputes them.
//
// Table 1: k0 = pi, spacing 0.1, epsilon = 0.01, beta = 0.5, gamma = 3.
// Table 2: k0 = 400/3, spacing 0.05/N, epsilon = 0.04, beta = 1e-4,
//          only the track probability P_trk.

#include <chrono>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "mott/scattering.hpp"

namespace mott {

enum class Observable { P_gnd, P_OS, P_trk };

inline const char* to_string(Observable o) {
    switch (o) {
        case Observable::P_gnd: return "P_gnd";
        case Observable::P_OS: return "P_OS";
        default: return "P_trk";
    }
}

struct ReferenceCell {
    int n_spins;
    double k0, spacing, epsilon, beta, gamma;
    Observable observable;
    double published;
};

inline std::vector<ReferenceCell> table1_cells() {
    const double k0 = std::numbers::pi;
    const struct {
        int n;
        double gnd, os, trk;
    } cols[] = {{2, 0.60514, 0.28992, 0.10494},
                {4, 0.41826, 0.36631, 0.21543},
                {6, 0.24661, 0.39652, 0.35687},
                {8, 0.15813, 0.37044, 0.47143}};
    std::vector<ReferenceCell> out;
    for (const auto& c : cols) {
        out.push_back({c.n, k0, 0.1, 0.01, 0.5, 3.0, Observable::P_gnd, c.gnd});
        out.push_back({c.n, k0, 0.1, 0.01, 0.5, 3.0, Observable::P_OS, c.os});
        out.push_back({c.n, k0, 0.1, 0.01, 0.5, 3.0, Observable::P_trk, c.trk});
    }
    return out;
}

inline std::vector<ReferenceCell> table2_cells() {
    const double k0 = 400.0 / 3.0;
    const double gammas[] = {50.0, 100.0, 150.0, 800.0 / 3.0};
    const struct {
        int n;
        double trk[4];
    } rows[] = {{2, {0.0074691, 0.063126, 0.14733, 0.24907}}, {3, {0.015572, 0.12502, 0.21374, 0.2812}},
                {4, {0.032093, 0.25924, 0.39707, 0.066758}},  {6, {0.07459, 0.40374, 0.51122, 0.22914}},
                {7, {0.099126, 0.47012, 0.40409, 0.37756}},   {8, {0.12356, 0.49174, 0.50721, 0.32307}}};
    std::vector<ReferenceCell> out;
    for (const auto& r : rows)
        for (int g = 0; g < 4; ++g)
            out.push_back({r.n, k0, 0.05 / r.n, 0.04, 1e-4, gammas[g], Observable::P_trk, r.trk[g]});
    return out;
}

struct CellResult {
    ReferenceCell cell;
    double computed = 0.0;
    double difference = 0.0;
    bool ok = false;
    std::string error;
};

inline double observable_value(const ChannelProbabilities& p, Observable o) {
    switch (o) {
        case Observable::P_gnd: return p.P_gnd;
        case Observable::P_OS: return p.P_OS;
        default: return p.P_trk;
    }
}

/// Solves each distinct configuration once and compares every cell.
inline std::vector<CellResult> reproduce(const std::vector<ReferenceCell>& cells, double tolerance,
                                         const SolveOptions& opt = {}) {
    std::vector<CellResult> out;
    const ReferenceCell* last = nullptr;
    ChannelProbabilities probs;
    std::string error;
    for (const auto& cell : cells) {
        const bool same = last && last->n_spins == cell.n_spins && last->k0 == cell.k0 && last->spacing == cell.spacing &&
                          last->epsilon == cell.epsilon && last->beta == cell.beta && last->gamma == cell.gamma;
        if (!same) {
            error.clear();
            try {
                const auto det = DetectorConfig::regular(cell.n_spins, cell.spacing, cell.beta, cell.gamma, cell.epsilon);
                probs = channel_probabilities(solve_scattering(det, cell.k0, opt));
            } catch (const std::exception& e) {
                error = e.what();
            }
            last = &cell;
        }
        CellResult r;
        r.cell = cell;
        if (error.empty()) {
            r.computed = observable_value(probs, cell.observable);
            r.difference = r.computed - cell.published;
            r.ok = std::abs(r.difference) <= tolerance;
        } else {
            r.error = error;
        }
        out.push_back(r);
    }
    return out;
}

inline void print_comparison(std::ostream& os, const std::string& name, const std::vector<CellResult>& results,
                             double tolerance) {
    os << name << " (tolerance " << tolerance << ")\n";
    os << "  N  gamma         observable  computed     published    |diff|       status\n";
    for (const auto& r : results) {
        os << "  " << std::setw(2) << r.cell.n_spins << " " << std::setw(12) << std::left << r.cell.gamma << std::right
           << "  " << std::setw(10) << std::left << to_string(r.cell.observable) << std::right;
        if (!r.error.empty()) {
            os << "  solver error: " << r.error << '\n';
            continue;
        }
        os << std::fixed << std::setprecision(7) << "  " << r.computed << "    " << r.cell.published << "    "
           << std::scientific << std::setprecision(2) << std::abs(r.difference) << "     " << (r.ok ? "ok" : "MISMATCH")
           << std::defaultfloat << std::setprecision(6) << '\n';
    }
}

}  // namespace mott
