#pragma once

// Channel bookkeeping for a particle coupled to N two-level detector atoms.
//
// A channel is one joint spin configuration of the mesh, written as an N-bit
// integer. Spin n (1-based) is the (N - n)-th bit, so spin 1 is the most
// significant one: for N = 6, c = 53 = 110101b has spins 3 and 5 down.
//
// Units: hbar^2 / 2m = 1, so a plane wave of wavenumber k carries energy k^2.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mott/errors.hpp"

namespace mott {

using complex = std::complex<double>;

inline constexpr int max_spins = 30;

class ChannelIndex {
public:
    ChannelIndex(std::uint32_t value, int n_spins) : value_(value), n_spins_(n_spins) {
        if (n_spins < 0 || n_spins > max_spins)
            throw std::invalid_argument("ChannelIndex: n_spins out of range");
        if (value >= channel_count(n_spins))
            throw std::invalid_argument("ChannelIndex: value must be < 2^N");
    }

    static constexpr std::uint32_t channel_count(int n_spins) { return std::uint32_t{1} << n_spins; }

    std::uint32_t value() const noexcept { return value_; }
    int n_spins() const noexcept { return n_spins_; }

    /// Bit mask selecting spin n (1-based).
    std::uint32_t spin_mask(int spin) const {
        if (spin < 1 || spin > n_spins_) throw std::out_of_range("ChannelIndex: spin out of range");
        return std::uint32_t{1} << (n_spins_ - spin);
    }

    bool spin_up(int spin) const { return (value_ & spin_mask(spin)) != 0; }

    ChannelIndex flipped(int spin) const { return {value_ ^ spin_mask(spin), n_spins_}; }

    friend bool operator==(const ChannelIndex&, const ChannelIndex&) = default;

private:
    std::uint32_t value_;
    int n_spins_;
};

inline int hamming_weight(ChannelIndex c) noexcept { return std::popcount(c.value()); }

/// Binary string of a channel, spin 1 first (e.g. "110101").
inline std::string to_binary(ChannelIndex c) {
    std::string s;
    for (int n = 1; n <= c.n_spins(); ++n) s.push_back(c.spin_up(n) ? '1' : '0');
    return s;
}

/// Fixed point scatterers. Each spin n sits at positions[n-1] and carries an
/// elastic strength beta, a spin-flip strength gamma and an excitation
/// energy epsilon >= 0.
class DetectorConfig {
public:
    DetectorConfig() = default;

    DetectorConfig(std::vector<double> positions, std::vector<double> beta, std::vector<double> gamma,
                   std::vector<double> epsilon)
        : positions_(std::move(positions)), beta_(std::move(beta)), gamma_(std::move(gamma)),
          epsilon_(std::move(epsilon)) {
        validate();
    }

    /// All spins identical.
    static DetectorConfig uniform(std::vector<double> positions, double beta, double gamma, double epsilon) {
        const auto n = positions.size();
        return {std::move(positions), std::vector<double>(n, beta), std::vector<double>(n, gamma),
                std::vector<double>(n, epsilon)};
    }

    /// Regular mesh y_n = offset + (n - 1) * spacing.
    static DetectorConfig regular(int n_spins, double spacing, double beta, double gamma, double epsilon,
                                  double offset = 0.0) {
        if (n_spins < 0) throw ConfigError("n_spins must be non-negative");
        std::vector<double> y(static_cast<std::size_t>(n_spins));
        for (int n = 0; n < n_spins; ++n) y[static_cast<std::size_t>(n)] = offset + n * spacing;
        return uniform(std::move(y), beta, gamma, epsilon);
    }

    int n_spins() const noexcept { return static_cast<int>(positions_.size()); }
    std::uint32_t channel_count() const { return ChannelIndex::channel_count(n_spins()); }

    // 1-based spin accessors.
    double position(int spin) const { return positions_.at(static_cast<std::size_t>(spin - 1)); }
    double beta(int spin) const { return beta_.at(static_cast<std::size_t>(spin - 1)); }
    double gamma(int spin) const { return gamma_.at(static_cast<std::size_t>(spin - 1)); }
    double epsilon(int spin) const { return epsilon_.at(static_cast<std::size_t>(spin - 1)); }

    const std::vector<double>& positions() const noexcept { return positions_; }
    const std::vector<double>& betas() const noexcept { return beta_; }
    const std::vector<double>& gammas() const noexcept { return gamma_; }
    const std::vector<double>& epsilons() const noexcept { return epsilon_; }

    DetectorConfig shifted(double delta) const {
        DetectorConfig out = *this;
        for (auto& y : out.positions_) y += delta;
        return out;
    }

    double min_gap() const {
        double g = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < positions_.size(); ++i) g = std::min(g, positions_[i] - positions_[i - 1]);
        return g;
    }

private:
    void validate() const {
        const auto n = positions_.size();
        if (beta_.size() != n || gamma_.size() != n || epsilon_.size() != n)
            throw ConfigError("DetectorConfig: beta, gamma and epsilon need one entry per spin");
        if (static_cast<int>(n) > max_spins) throw ConfigError("DetectorConfig: too many spins");
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(positions_[i]) || !std::isfinite(beta_[i]) || !std::isfinite(gamma_[i]) ||
                !std::isfinite(epsilon_[i]))
                throw ConfigError("DetectorConfig: non-finite parameter");
            if (epsilon_[i] < 0.0) throw ConfigError("DetectorConfig: epsilon must be >= 0");
            if (i > 0 && !(positions_[i] > positions_[i - 1])) {
                std::ostringstream os;
                os << "spin positions must be strictly increasing (spin " << i << " at " << positions_[i - 1]
                   << ", spin " << i + 1 << " at " << positions_[i] << ")";
                throw OverlappingSpins(os.str());
            }
        }
    }

    std::vector<double> positions_, beta_, gamma_, epsilon_;
};

struct ChannelKinematics {
    double threshold = 0.0;
    complex wavenumber{};
    bool open = false;
};

/// Sum of the excitation energies of the up spins.
inline double channel_threshold(ChannelIndex c, const DetectorConfig& det) {
    if (c.n_spins() != det.n_spins()) throw std::invalid_argument("channel_threshold: N mismatch");
    double e = 0.0;
    for (int n = 1; n <= det.n_spins(); ++n)
        if (c.spin_up(n)) e += det.epsilon(n);
    return e;
}

inline double threshold_tolerance(double energy) { return 1e-12 * std::max(energy, 1.0); }

/// Wavenumber of a channel at total energy E. Closed channels get the
/// root with positive imaginary part so that their tails decay away from
/// the mesh on both sides.
inline ChannelKinematics channel_wavenumber(double energy, double threshold) {
    if (!(energy > 0.0)) throw std::invalid_argument("channel_wavenumber: energy must be positive");
    const double gap = energy - threshold;
    if (std::abs(gap) < threshold_tolerance(energy)) {
        std::ostringstream os;
        os << "energy " << energy << " coincides with channel threshold " << threshold;
        throw ThresholdDegeneracy(os.str());
    }
    if (gap > 0.0) return {threshold, complex{std::sqrt(gap), 0.0}, true};
    return {threshold, complex{0.0, std::sqrt(-gap)}, false};
}

inline ChannelKinematics channel_kinematics(ChannelIndex c, const DetectorConfig& det, double energy) {
    return channel_wavenumber(energy, channel_threshold(c, det));
}

/// Channels reached from c by one spin flip, paired with the flipped spin.
/// The coupling graph is the N-dimensional hypercube.
inline std::vector<std::pair<int, ChannelIndex>> coupled_channels(ChannelIndex c) {
    std::vector<std::pair<int, ChannelIndex>> out;
    out.reserve(static_cast<std::size_t>(c.n_spins()));
    for (int n = 1; n <= c.n_spins(); ++n) out.emplace_back(n, c.flipped(n));
    return out;
}

}  // namespace mott
