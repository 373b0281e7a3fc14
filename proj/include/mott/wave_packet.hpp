#pragma once

// Time-dependent wave packets on a uniform grid.
//
// The state carries one spatial component per channel. Space uses the
// three-point Laplacian with hard walls just outside the grid ends; a Dirac
// peak at y_n becomes a weight 1/dx on the nearest grid point. Time steps
// apply exp(-i H dt) through a Lanczos (Krylov subspace) approximation whose
// dimension grows until an a-posteriori error bound is met.

#include <Eigen/Dense>

#include <cmath>
#include <concepts>
#include <cstdint>
#include <sstream>
#include <vector>

#include "mott/channel_space.hpp"
#include "mott/scattering.hpp"

namespace mott {

class Grid {
public:
    Grid(double x_min, double x_max, int n_points) : x_min_(x_min), x_max_(x_max), n_points_(n_points) {
        if (!(x_max > x_min)) throw ConfigError("Grid: x_max must exceed x_min");
        if (n_points < 3) throw ConfigError("Grid: need at least 3 points");
    }

    double x_min() const noexcept { return x_min_; }
    double x_max() const noexcept { return x_max_; }
    int n_points() const noexcept { return n_points_; }
    double dx() const noexcept { return (x_max_ - x_min_) / (n_points_ - 1); }
    double x(int j) const noexcept { return x_min_ + j * dx(); }

    /// Nearest grid index of a point strictly inside the grid.
    int nearest(double y) const {
        if (!(y > x_min_ && y < x_max_)) {
            std::ostringstream os;
            os << "position " << y << " is outside the grid (" << x_min_ << ", " << x_max_ << ")";
            throw SpinOutsideGrid(os.str());
        }
        return static_cast<int>(std::lround((y - x_min_) / dx()));
    }

private:
    double x_min_, x_max_;
    int n_points_;
};

enum class PacketMode { right, left, twin };

/// Gaussian envelope exp(-(x - center)^2 / (4 width^2)) in the ground
/// channel; width is the standard deviation of |psi|^2.
struct PacketSpec {
    double center = 0.0;
    double width = 1.0;
    double wavenumber = 1.0;
    PacketMode mode = PacketMode::twin;
};

/// Channel-major storage: component c occupies psi[c*M, (c+1)*M).
struct WavePacketState {
    double t = 0.0;
    int n_spins = 0;
    Grid grid{0.0, 1.0, 3};
    Eigen::VectorXcd psi;

    std::uint32_t channel_count() const { return ChannelIndex::channel_count(n_spins); }
    auto channel(std::uint32_t c) const { return psi.segment(Eigen::Index{c} * grid.n_points(), grid.n_points()); }
    auto channel(std::uint32_t c) { return psi.segment(Eigen::Index{c} * grid.n_points(), grid.n_points()); }
};

inline double total_norm(const WavePacketState& s) { return s.psi.squaredNorm() * s.grid.dx(); }

inline WavePacketState initial_state(const Grid& grid, int n_spins, const PacketSpec& packet) {
    if (!(packet.width > 0.0)) throw ConfigError("packet width must be positive");
    WavePacketState s;
    s.n_spins = n_spins;
    s.grid = grid;
    s.psi = Eigen::VectorXcd::Zero(Eigen::Index{grid.n_points()} * s.channel_count());
    const complex i{0.0, 1.0};
    for (int j = 0; j < grid.n_points(); ++j) {
        const double x = grid.x(j);
        const double u = (x - packet.center) / packet.width;
        const double env = std::exp(-0.25 * u * u);
        complex carrier;
        switch (packet.mode) {
            case PacketMode::right: carrier = std::exp(i * packet.wavenumber * x); break;
            case PacketMode::left: carrier = std::exp(-i * packet.wavenumber * x); break;
            case PacketMode::twin: carrier = 2.0 * std::cos(packet.wavenumber * x); break;
        }
        s.psi[j] = env * carrier;
    }
    s.psi /= std::sqrt(total_norm(s));
    return s;
}

/// Matrix-free finite-difference Hamiltonian over all channels.
class GridHamiltonian {
public:
    GridHamiltonian(const DetectorConfig& det, const Grid& grid) : grid_(grid), n_spins_(det.n_spins()) {
        const auto n_ch = ChannelIndex::channel_count(n_spins_);
        thresholds_.resize(n_ch);
        for (std::uint32_t c = 0; c < n_ch; ++c) thresholds_[c] = channel_threshold(ChannelIndex{c, n_spins_}, det);
        for (int n = 1; n <= n_spins_; ++n) {
            const int j = grid.nearest(det.position(n));
            for (const auto& s : sites_)
                if (s.index == j) {
                    std::ostringstream os;
                    os << "spins at " << s.position << " and " << det.position(n) << " share grid point " << j;
                    throw SpinCollision(os.str());
                }
            sites_.push_back({j, det.position(n), ChannelIndex{0, n_spins_}.spin_mask(n), det.beta(n) / grid.dx(),
                              det.gamma(n) / grid.dx()});
        }
    }

    const Grid& grid() const noexcept { return grid_; }
    int n_spins() const noexcept { return n_spins_; }
    Eigen::Index dimension() const { return Eigen::Index{grid_.n_points()} * static_cast<Eigen::Index>(thresholds_.size()); }

    /// out = H in.
    template <class In>
    void apply(const In& in, Eigen::VectorXcd& out) const {
        const int m = grid_.n_points();
        const double h2 = 1.0 / (grid_.dx() * grid_.dx());
        out.resize(in.size());
        for (std::size_t c = 0; c < thresholds_.size(); ++c) {
            const complex* u = in.data() + c * m;
            complex* v = out.data() + c * m;
            const double diag = 2.0 * h2 + thresholds_[c];
            v[0] = diag * u[0] - h2 * u[1];
            for (int j = 1; j < m - 1; ++j) v[j] = diag * u[j] - h2 * (u[j - 1] + u[j + 1]);
            v[m - 1] = diag * u[m - 1] - h2 * u[m - 2];
        }
        for (const auto& s : sites_)
            for (std::size_t c = 0; c < thresholds_.size(); ++c) {
                const std::size_t cp = c ^ s.mask;
                out[c * m + s.index] += s.beta * in[c * m + s.index] + s.gamma * in[cp * m + s.index];
            }
    }

    Eigen::VectorXcd operator*(const Eigen::VectorXcd& in) const {
        Eigen::VectorXcd out;
        apply(in, out);
        return out;
    }

    /// Gershgorin bound on the spectral radius.
    double spectral_bound() const {
        double b = 4.0 / (grid_.dx() * grid_.dx());
        double emax = 0.0;
        for (double e : thresholds_) emax = std::max(emax, e);
        double site = 0.0;
        for (const auto& s : sites_) site = std::max(site, std::abs(s.beta) + std::abs(s.gamma));
        return b + emax + site;
    }

private:
    struct Site {
        int index;
        double position;
        std::uint32_t mask;
        double beta, gamma;  // already divided by dx
    };

    Grid grid_;
    int n_spins_;
    std::vector<double> thresholds_;
    std::vector<Site> sites_;
};

inline GridHamiltonian discretize_hamiltonian(const DetectorConfig& det, const Grid& grid) { return {det, grid}; }

/// Anything that applies a Hermitian matrix to a state vector.
template <class Op>
concept HermitianOperator = requires(const Op& op, const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
    op.apply(in, out);
    { op.dimension() } -> std::convertible_to<Eigen::Index>;
};

/// <psi, H psi> with the grid measure.
template <HermitianOperator Op>
double energy(const WavePacketState& s, const Op& h) {
    Eigen::VectorXcd hpsi;
    h.apply(s.psi, hpsi);
    return s.psi.dot(hpsi).real() * s.grid.dx();
}

struct PropagationOptions {
    double tolerance = 1e-12;  ///< per-step bound on the Krylov truncation error, relative to ||psi||
    int max_krylov = 150;
    double max_norm_drift = 1e-10;  ///< per step
};

struct PropagationStats {
    int steps = 0;
    int max_krylov_used = 0;
    double max_norm_drift = 0.0;
};

namespace detail {

struct KrylovWorkspace {
    Eigen::MatrixXcd basis;  // one Lanczos vector per column
    Eigen::VectorXcd w;
    std::vector<double> alpha, beta;
    int hint = 4;
};

// psi <- exp(-i H dt) psi by Lanczos. Returns the subspace dimension used.
// The error bound needs an eigensolve of the projection, so it is only
// evaluated from ws.hint on (the previous step's size is a good guess) and
// every other iteration after that.
template <class Op>
int lanczos_step(Eigen::VectorXcd& psi, const Op& h, double dt, const PropagationOptions& opt,
                        KrylovWorkspace& ws) {
    const double norm0 = psi.norm();
    if (norm0 == 0.0) return 0;
    const Eigen::Index n = psi.size();
    if (ws.basis.rows() != n || ws.basis.cols() < opt.max_krylov) ws.basis.resize(n, opt.max_krylov);
    ws.alpha.clear();
    ws.beta.clear();
    ws.basis.col(0) = psi / norm0;
    const complex i{0.0, 1.0};

    for (int m = 1; m <= opt.max_krylov; ++m) {
        auto v = ws.basis.col(m - 1);
        h.apply(v, ws.w);
        const double a = v.dot(ws.w).real();
        ws.w -= a * v;
        if (m > 1) ws.w -= ws.beta.back() * ws.basis.col(m - 2);
        ws.alpha.push_back(a);
        const double b = ws.w.norm();
        const bool invariant = b <= 1e-14 * std::abs(a) + 1e-300;
        const bool check = invariant || m == opt.max_krylov || (m >= ws.hint && (m - ws.hint) % 2 == 0);

        if (check) {
            // exp(-i T_m dt) e_1 on the tridiagonal projection.
            Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
            for (int k = 0; k < m; ++k) t(k, k) = ws.alpha[static_cast<std::size_t>(k)];
            for (int k = 0; k + 1 < m; ++k) t(k, k + 1) = t(k + 1, k) = ws.beta[static_cast<std::size_t>(k)];
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(t);
            const Eigen::MatrixXd& q = eig.eigenvectors();
            Eigen::VectorXcd phase(m);
            for (int k = 0; k < m; ++k) phase[k] = std::exp(-i * eig.eigenvalues()[k] * dt) * q(0, k);
            const Eigen::VectorXcd coeff = q.cast<complex>() * phase;

            if (invariant || b * std::abs(coeff[m - 1]) < opt.tolerance) {
                psi.noalias() = ws.basis.leftCols(m) * coeff;
                psi *= norm0;
                ws.hint = std::max(4, m - 2);
                return m;
            }
        }
        if (m == opt.max_krylov) break;
        ws.beta.push_back(b);
        ws.basis.col(m) = ws.w / b;
    }
    std::ostringstream os;
    os << "Krylov exponential did not converge within " << opt.max_krylov << " vectors at dt = " << dt
       << "; reduce the time step";
    throw ConvergenceFailure(os.str());
}

}  // namespace detail

/// Applies exp(-i H dt) `steps` times. Throws ConvergenceFailure when a step
/// cannot meet the tolerance or the norm drifts; the caller should then
/// reduce dt.
template <HermitianOperator Op>
WavePacketState propagate(const WavePacketState& state, const Op& h, double dt, int steps,
                          const PropagationOptions& opt = {}, PropagationStats* stats = nullptr) {
    if (!(dt > 0.0)) throw std::invalid_argument("propagate: dt must be positive");
    if (steps < 0) throw std::invalid_argument("propagate: negative step count");
    if (state.psi.size() != h.dimension()) throw std::invalid_argument("propagate: state and Hamiltonian differ in size");

    WavePacketState out = state;
    detail::KrylovWorkspace ws;
    for (int s = 0; s < steps; ++s) {
        const double before = out.psi.norm();
        const int m = detail::lanczos_step(out.psi, h, dt, opt, ws);
        const double drift = before > 0.0 ? std::abs(out.psi.norm() / before - 1.0) : 0.0;
        if (drift > opt.max_norm_drift) {
            std::ostringstream os;
            os << "norm drift " << drift << " in one step exceeds " << opt.max_norm_drift << "; reduce the time step";
            throw ConvergenceFailure(os.str());
        }
        out.t += dt;
        if (stats) {
            ++stats->steps;
            stats->max_krylov_used = std::max(stats->max_krylov_used, m);
            stats->max_norm_drift = std::max(stats->max_norm_drift, drift);
        }
    }
    return out;
}

/// P_c(t) = sum_j |psi_c,j|^2 dx with Hamming-weight aggregates. The
/// unitarity_defect field holds |1 - total norm|.
inline ChannelProbabilities configuration_probabilities(const WavePacketState& s) {
    std::vector<double> p(s.channel_count());
    for (std::uint32_t c = 0; c < s.channel_count(); ++c) p[c] = s.channel(c).squaredNorm() * s.grid.dx();
    return aggregate_channels(std::move(p), s.n_spins);
}

/// First and second moments of the total position density.
inline std::pair<double, double> position_moments(const WavePacketState& s) {
    double w = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::uint32_t c = 0; c < s.channel_count(); ++c) {
        const auto comp = s.channel(c);
        for (int j = 0; j < s.grid.n_points(); ++j) {
            const double d = std::norm(comp[j]);
            const double x = s.grid.x(j);
            w += d;
            m1 += d * x;
            m2 += d * x * x;
        }
    }
    const double mean = m1 / w;
    return {mean, std::sqrt(std::max(0.0, m2 / w - mean * mean))};
}

}  // namespace mott
