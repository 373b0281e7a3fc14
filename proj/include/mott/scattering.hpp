#pragma once

// Stationary scattering of a unit plane wave e^{i k0 x}, incident from the
// left in the ground channel, on a one-sided mesh of N spins.
//
// The line is cut into N + 1 regions by the spin positions y_1 < ... < y_N;
// region i lies between y_{i-1} and y_i. In every channel c the wave is
//
//   region 1      : delta_{c0} e^{i k0 x} + R_c e^{-i k_c x}
//   region i      : A_{c,i} e^{i k_c (x - y_{i-1})} + B_{c,i} e^{-i k_c (x - y_i)}
//   region N + 1  : T_c e^{i k_c x}
//
// Interior amplitudes are referenced to the edge each wave decays away from,
// so evanescent factors are bounded by 1 in closed channels. Matching at
// every y_n gives, per channel, continuity of psi_c and the derivative jump
//
//   psi_c'(y_n+) - psi_c'(y_n-) = beta_n psi_c(y_n) + gamma_n psi_{c'}(y_n),
//
// c' being c with spin n flipped: 2N equations per channel, 2N * 2^N total.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <vector>

#include "mott/channel_space.hpp"
#include "mott/single_spin.hpp"

namespace mott {

using SparseMatrix = Eigen::SparseMatrix<complex, Eigen::ColMajor, int>;

/// Column layout of the matching system: per channel the 2N unknowns
/// [R, A_2, B_2, ..., A_N, B_N, T].
class UnknownLayout {
public:
    explicit UnknownLayout(int n_spins) : n_spins_(n_spins), channels_(ChannelIndex::channel_count(n_spins)) {}

    int n_spins() const noexcept { return n_spins_; }
    std::uint32_t channels() const noexcept { return channels_; }
    int per_channel() const noexcept { return 2 * n_spins_; }
    Eigen::Index dimension() const noexcept { return Eigen::Index{per_channel()} * channels_; }

    Eigen::Index reflection(std::uint32_t c) const { return base(c); }
    Eigen::Index transmission(std::uint32_t c) const { return base(c) + per_channel() - 1; }
    /// Interior region 2 <= region <= N.
    Eigen::Index right_moving(std::uint32_t c, int region) const { return base(c) + 1 + 2 * (region - 2); }
    Eigen::Index left_moving(std::uint32_t c, int region) const { return base(c) + 2 + 2 * (region - 2); }

private:
    Eigen::Index base(std::uint32_t c) const { return Eigen::Index{per_channel()} * c; }

    int n_spins_;
    std::uint32_t channels_;
};

struct ScatteringSystem {
    UnknownLayout layout{1};
    std::vector<ChannelKinematics> kinematics;
    SparseMatrix matrix;
    Eigen::VectorXcd rhs;
};

namespace detail {

// One unknown's contribution to psi and psi' at a matching point.
struct Trace {
    Eigen::Index column;
    complex value;
    complex slope;
};

struct Side {
    Trace terms[2];
    int size = 0;
    void add(Eigen::Index col, complex v, complex d) { terms[size++] = {col, v, d}; }
    const Trace* begin() const { return terms; }
    const Trace* end() const { return terms + size; }
};

inline Side left_side(const UnknownLayout& lay, const DetectorConfig& det, std::uint32_t c, complex k, int spin) {
    const complex i{0.0, 1.0};
    Side s;
    if (spin == 1) {
        s.add(lay.reflection(c), 1.0, -i * k);
    } else {
        const complex e = std::exp(i * k * (det.position(spin) - det.position(spin - 1)));
        s.add(lay.right_moving(c, spin), e, i * k * e);
        s.add(lay.left_moving(c, spin), 1.0, -i * k);
    }
    return s;
}

inline Side right_side(const UnknownLayout& lay, const DetectorConfig& det, std::uint32_t c, complex k, int spin) {
    const complex i{0.0, 1.0};
    Side s;
    if (spin == det.n_spins()) {
        s.add(lay.transmission(c), 1.0, i * k);
    } else {
        const complex e = std::exp(i * k * (det.position(spin + 1) - det.position(spin)));
        s.add(lay.right_moving(c, spin + 1), 1.0, i * k);
        s.add(lay.left_moving(c, spin + 1), e, -i * k * e);
    }
    return s;
}

}  // namespace detail

inline std::vector<ChannelKinematics> all_channel_kinematics(const DetectorConfig& det, double energy) {
    std::vector<ChannelKinematics> out;
    out.reserve(det.channel_count());
    for (std::uint32_t c = 0; c < det.channel_count(); ++c)
        out.push_back(channel_kinematics(ChannelIndex{c, det.n_spins()}, det, energy));
    return out;
}

/// Builds the matching system. The incident wave is given unit amplitude at
/// y_1; solve_system restores the e^{i k0 x} phase convention.
inline ScatteringSystem assemble_system(const DetectorConfig& det, double k0) {
    if (det.n_spins() < 1) throw std::invalid_argument("assemble_system: detector needs at least one spin");
    if (!(k0 > 0.0)) throw std::invalid_argument("assemble_system: k0 must be positive");
    if (det.min_gap() <= 0.0) throw OverlappingSpins("spin positions must be strictly increasing");

    ScatteringSystem sys;
    sys.layout = UnknownLayout(det.n_spins());
    sys.kinematics = all_channel_kinematics(det, k0 * k0);
    const auto& lay = sys.layout;
    const auto n_ch = lay.channels();
    const Eigen::Index dim = lay.dimension();
    const complex i{0.0, 1.0};

    std::vector<Eigen::Triplet<complex, int>> trip;
    trip.reserve(static_cast<std::size_t>(dim) * 5);
    sys.rhs = Eigen::VectorXcd::Zero(dim);

    int row = 0;
    for (int spin = 1; spin <= det.n_spins(); ++spin) {
        const std::uint32_t flip = ChannelIndex{0, det.n_spins()}.spin_mask(spin);
        const double beta = det.beta(spin), gamma = det.gamma(spin);
        for (std::uint32_t c = 0; c < n_ch; ++c) {
            const complex k = sys.kinematics[c].wavenumber;
            const auto L = detail::left_side(lay, det, c, k, spin);
            const auto R = detail::right_side(lay, det, c, k, spin);
            const std::uint32_t cp = c ^ flip;
            const auto Rp = detail::right_side(lay, det, cp, sys.kinematics[cp].wavenumber, spin);
            const bool incident = (spin == 1 && c == 0);

            // psi_c(y-) - psi_c(y+) = 0
            for (const auto& t : L) trip.emplace_back(row, static_cast<int>(t.column), t.value);
            for (const auto& t : R) trip.emplace_back(row, static_cast<int>(t.column), -t.value);
            if (incident) sys.rhs[row] = -1.0;
            ++row;

            // psi_c'(y+) - psi_c'(y-) - beta psi_c(y) - gamma psi_c'(y) = 0
            for (const auto& t : R) trip.emplace_back(row, static_cast<int>(t.column), t.slope - beta * t.value);
            for (const auto& t : L) trip.emplace_back(row, static_cast<int>(t.column), -t.slope);
            if (gamma != 0.0)
                for (const auto& t : Rp) trip.emplace_back(row, static_cast<int>(t.column), -gamma * t.value);
            if (incident) sys.rhs[row] = i * k0;
            ++row;
        }
    }

    sys.matrix.resize(dim, dim);
    sys.matrix.setFromTriplets(trip.begin(), trip.end());
    sys.matrix.makeCompressed();
    return sys;
}

enum class SolverPath { automatic, dense, sparse };

inline const char* to_string(SolverPath p) {
    switch (p) {
        case SolverPath::dense: return "dense";
        case SolverPath::sparse: return "sparse";
        default: return "automatic";
    }
}

struct SolveOptions {
    SolverPath path = SolverPath::automatic;
    /// automatic switches to the sparse factorisation above this dimension.
    Eigen::Index dense_limit = 1024;
    double max_relative_residual = 1e-10;
};

class ScatteringSolution;
inline ScatteringSolution solve_system(const ScatteringSystem& sys, const DetectorConfig& det, double k0,
                                       const SolveOptions& opt = {});

class ScatteringSolution {
public:
    double energy = 0.0;
    double k0 = 0.0;
    DetectorConfig detector;
    std::vector<ChannelKinematics> kinematics;
    /// Amplitudes of R_c e^{-i k_c x} and T_c e^{i k_c x} for incident e^{i k0 x}.
    std::vector<complex> R, T;
    double residual = 0.0;  ///< ||A x - b|| / ||b||
    double rcond = 0.0;     ///< reciprocal 1-norm condition estimate
    SolverPath path = SolverPath::dense;

    int n_spins() const { return detector.n_spins(); }
    std::uint32_t channel_count() const { return detector.channel_count(); }

    /// Interior amplitudes, 2 <= region <= N. A is referenced to y_{region-1},
    /// B to y_region.
    complex right_moving(std::uint32_t c, int region) const { return interior_[interior_index(c, region)]; }
    complex left_moving(std::uint32_t c, int region) const { return interior_[interior_index(c, region) + 1]; }

    /// psi_c(x) on the full line.
    complex wavefunction(std::uint32_t c, double x) const { return evaluate(c, x, false); }
    complex derivative(std::uint32_t c, double x) const { return evaluate(c, x, true); }

private:
    friend ScatteringSolution solve_system(const ScatteringSystem&, const DetectorConfig&, double,
                                           const SolveOptions&);

    std::size_t interior_index(std::uint32_t c, int region) const {
        if (region < 2 || region > n_spins()) throw std::out_of_range("interior region out of range");
        return 2 * (static_cast<std::size_t>(c) * static_cast<std::size_t>(n_spins() - 1) +
                    static_cast<std::size_t>(region - 2));
    }

    complex evaluate(std::uint32_t c, double x, bool slope) const {
        const complex i{0.0, 1.0};
        const complex k = kinematics.at(c).wavenumber;
        const int n = n_spins();
        auto wave = [&](complex amp, complex kk, double origin) {
            const complex v = amp * std::exp(i * kk * (x - origin));
            return slope ? i * kk * v : v;
        };
        if (x < detector.position(1)) {
            complex v = wave(R[c], -k, 0.0);
            if (c == 0) v += wave(1.0, k0, 0.0);
            return v;
        }
        if (x >= detector.position(n)) return wave(T[c], k, 0.0);
        const auto& y = detector.positions();
        const int region = static_cast<int>(std::upper_bound(y.begin(), y.end(), x) - y.begin()) + 1;
        return wave(right_moving(c, region), k, detector.position(region - 1)) +
               wave(left_moving(c, region), -k, detector.position(region));
    }

    std::vector<complex> interior_;
};

namespace detail {

// Hager-Higham estimate of ||A^{-1}||_1 from a factorisation offering
// solve() and adjoint().solve().
template <class Factorisation>
double inverse_norm1_estimate(Factorisation& f, Eigen::Index n) {
    Eigen::VectorXcd x = Eigen::VectorXcd::Constant(n, complex(1.0 / static_cast<double>(n)));
    double est = 0.0;
    Eigen::Index last = -1;
    for (int iter = 0; iter < 5; ++iter) {
        const Eigen::VectorXcd y = f.solve(x);
        const double norm = y.lpNorm<1>();
        if (iter > 0 && norm <= est) break;
        est = norm;
        Eigen::VectorXcd xi(n);
        for (Eigen::Index j = 0; j < n; ++j) xi[j] = std::abs(y[j]) > 0.0 ? y[j] / std::abs(y[j]) : complex(1.0);
        const Eigen::VectorXcd z = f.adjoint().solve(xi);
        Eigen::Index j = 0;
        const double zmax = z.cwiseAbs().maxCoeff(&j);
        if (zmax <= (z.adjoint() * x)(0).real() || j == last) break;
        last = j;
        x.setZero();
        x[j] = 1.0;
    }
    return est;
}

inline double norm1(const SparseMatrix& m) {
    double best = 0.0;
    for (int col = 0; col < m.outerSize(); ++col) {
        double s = 0.0;
        for (SparseMatrix::InnerIterator it(m, col); it; ++it) s += std::abs(it.value());
        best = std::max(best, s);
    }
    return best;
}

}  // namespace detail

/// Solves an assembled matching system and maps the unknowns back onto
/// amplitudes for the incident wave e^{i k0 x}.
inline ScatteringSolution solve_system(const ScatteringSystem& sys, const DetectorConfig& det, double k0,
                                       const SolveOptions& opt) {
    const Eigen::Index dim = sys.layout.dimension();
    if (sys.matrix.rows() != dim || sys.matrix.cols() != dim || sys.rhs.size() != dim)
        throw std::invalid_argument("solve_system: system is not square in the expected dimension");

    ScatteringSolution sol;
    sol.path = opt.path;
    if (sol.path == SolverPath::automatic)
        sol.path = dim <= opt.dense_limit ? SolverPath::dense : SolverPath::sparse;

    Eigen::VectorXcd x;
    if (sol.path == SolverPath::dense) {
        const Eigen::MatrixXcd a(sys.matrix);
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
        sol.rcond = lu.rcond();
        x = lu.solve(sys.rhs);
    } else {
        Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
        lu.analyzePattern(sys.matrix);
        lu.factorize(sys.matrix);
        if (lu.info() != Eigen::Success) throw SingularSystem("sparse factorisation failed: " + lu.lastErrorMessage(), 0.0);
        x = lu.solve(sys.rhs);
        sol.rcond = 1.0 / (detail::norm1(sys.matrix) * detail::inverse_norm1_estimate(lu, dim));
    }

    if (!x.allFinite()) throw SingularSystem("matching system produced non-finite amplitudes", sol.rcond);
    sol.residual = (sys.matrix * x - sys.rhs).norm() / sys.rhs.norm();
    if (!(sol.residual < opt.max_relative_residual)) {
        std::ostringstream os;
        os << "relative residual " << sol.residual << " exceeds " << opt.max_relative_residual;
        throw SingularSystem(os.str(), sol.rcond);
    }

    const complex i{0.0, 1.0};
    const int n = det.n_spins();
    const double y1 = det.position(1), yn = det.position(n);
    const complex incident_phase = std::exp(i * k0 * y1);

    sol.energy = k0 * k0;
    sol.k0 = k0;
    sol.detector = det;
    sol.kinematics = sys.kinematics;
    const auto n_ch = sys.layout.channels();
    sol.R.resize(n_ch);
    sol.T.resize(n_ch);
    sol.interior_.resize(2 * static_cast<std::size_t>(n_ch) * static_cast<std::size_t>(n - 1));
    for (std::uint32_t c = 0; c < n_ch; ++c) {
        const complex k = sys.kinematics[c].wavenumber;
        sol.R[c] = x[sys.layout.reflection(c)] * incident_phase * std::exp(i * k * y1);
        sol.T[c] = x[sys.layout.transmission(c)] * incident_phase * std::exp(-i * k * yn);
        for (int region = 2; region <= n; ++region) {
            const auto at = sol.interior_index(c, region);
            sol.interior_[at] = x[sys.layout.right_moving(c, region)] * incident_phase;
            sol.interior_[at + 1] = x[sys.layout.left_moving(c, region)] * incident_phase;
        }
    }
    return sol;
}

inline ScatteringSolution solve_scattering(const DetectorConfig& det, double k0, const SolveOptions& opt = {}) {
    return solve_system(assemble_system(det, k0), det, k0, opt);
}

/// Flux into each channel, relative to the incident flux k0. Closed channels
/// carry none.
inline std::vector<double> channel_fluxes(const ScatteringSolution& sol) {
    std::vector<double> p(sol.channel_count(), 0.0);
    for (std::uint32_t c = 0; c < sol.channel_count(); ++c) {
        const auto& kin = sol.kinematics[c];
        if (!kin.open) continue;
        p[c] = kin.wavenumber.real() / sol.k0 * (std::norm(sol.R[c]) + std::norm(sol.T[c]));
    }
    return p;
}

inline double unitarity_defect(const ScatteringSolution& sol) {
    double total = 0.0;
    for (double p : channel_fluxes(sol)) total += p;
    return std::abs(1.0 - total);
}

struct ChannelProbabilities {
    std::vector<double> p;          ///< per channel
    std::vector<double> by_weight;  ///< per Hamming weight 0..N
    double P_gnd = 0.0;
    double P_OS = 0.0;
    double P_trk = 0.0;
    /// Shannon entropy of the channel distribution. For N = 1 this is the
    /// single-spin spin entropy; for N > 1 it is a generalisation of it.
    double spin_entropy = 0.0;
    double unitarity_defect = 0.0;
};

inline constexpr double unitarity_rejection_threshold = 1e-6;

/// Aggregates from a per-channel distribution (also used by the time-dependent observables).
inline ChannelProbabilities aggregate_channels(std::vector<double> p, int n_spins) {
    ChannelProbabilities out;
    out.by_weight.assign(static_cast<std::size_t>(n_spins) + 1, 0.0);
    double total = 0.0;
    for (std::uint32_t c = 0; c < p.size(); ++c) {
        out.by_weight[static_cast<std::size_t>(std::popcount(c))] += p[c];
        out.spin_entropy += shannon_term(p[c]);
        total += p[c];
    }
    out.P_gnd = out.by_weight[0];
    out.P_OS = n_spins >= 1 ? out.by_weight[1] : 0.0;
    for (std::size_t w = 2; w < out.by_weight.size(); ++w) out.P_trk += out.by_weight[w];
    out.unitarity_defect = std::abs(1.0 - total);
    out.p = std::move(p);
    return out;
}

inline ChannelProbabilities channel_probabilities(const ScatteringSolution& sol) {
    auto out = aggregate_channels(channel_fluxes(sol), sol.n_spins());
    if (!(out.unitarity_defect < unitarity_rejection_threshold)) {
        std::ostringstream os;
        os << "unitarity defect " << out.unitarity_defect << " exceeds " << unitarity_rejection_threshold;
        throw UnitarityViolation(os.str(), out.unitarity_defect);
    }
    return out;
}

}  // namespace mott
