#pragma once

// Closed-form scattering of a ground-channel plane wave on one spin at x = 0.
//
//   ground:  e^{i k0 x} + R0 e^{-i k0 x}  (x < 0),   T0 e^{i k0 x}  (x > 0)
//   excited: R1 e^{-i k1 x}               (x < 0),   T1 e^{i k1 x}  (x > 0)
//
// with k1 = sqrt(k0^2 - eps) and common denominator
//   D = (beta - 2i k0)(beta - 2i k1) - gamma^2.

#include <cmath>
#include <numbers>

#include "mott/channel_space.hpp"

namespace mott {

struct SingleSpinCoefficients {
    complex R0, T0, R1, T1;
    complex k1;      ///< excited-channel wavenumber
    bool excited_open = true;
};

inline SingleSpinCoefficients solve_single_spin(double k0, double beta, double gamma, double eps) {
    if (!(k0 > 0.0)) throw std::invalid_argument("solve_single_spin: k0 must be positive");
    const auto kin = channel_wavenumber(k0 * k0, eps);
    const complex i{0.0, 1.0};
    const complex k1 = kin.wavenumber;
    const complex d = (beta - 2.0 * i * k0) * (beta - 2.0 * i * k1) - gamma * gamma;

    SingleSpinCoefficients s;
    s.k1 = k1;
    s.excited_open = kin.open;
    s.R1 = 2.0 * i * k0 * gamma / d;
    s.T1 = s.R1;
    s.R0 = (2.0 * i * k1 * beta - beta * beta + gamma * gamma) / d;
    s.T0 = -2.0 * i * k0 * (beta - 2.0 * i * k1) / d;
    return s;
}

/// Flux fraction leaving in the excited channel.
///
///   P_exc = 8 k0 k1 g^2 / (4 b^2 (k0 + k1)^2 + (4 k0 k1 - b^2 + g^2)^2)
inline double single_spin_excitation_probability(double k0, double beta, double gamma, double eps) {
    if (!(k0 > 0.0)) throw std::invalid_argument("single_spin_excitation_probability: k0 must be positive");
    if (k0 * k0 <= eps) throw ClosedChannel("excited channel is closed (k0^2 <= epsilon): P_exc = 0");
    const double k1 = std::sqrt(k0 * k0 - eps);
    const double g2 = gamma * gamma, b2 = beta * beta;
    const double a = 4.0 * k0 * k1 - b2 + g2;
    return 8.0 * k0 * k1 * g2 / (4.0 * b2 * (k0 + k1) * (k0 + k1) + a * a);
}

/// Coupling strength maximising P_exc. Writing P_exc = a g / (b + (c + g)^2)
/// in g = gamma^2, the stationary point is g^2 = b + c^2.
inline double gamma_max(double k0, double beta, double eps) {
    if (!(k0 > 0.0)) throw std::invalid_argument("gamma_max: k0 must be positive");
    if (k0 * k0 <= eps) throw ClosedChannel("gamma_max: excited channel is closed");
    const double k1 = std::sqrt(k0 * k0 - eps);
    const double b = 4.0 * beta * beta * (k0 + k1) * (k0 + k1);
    const double c = 4.0 * k0 * k1 - beta * beta;
    return std::sqrt(std::sqrt(b + c * c));
}

/// -sum p ln p with 0 ln 0 = 0.
inline double shannon_term(double p) { return p > 0.0 ? -p * std::log(p) : 0.0; }

/// Spin entropy of a two-outcome split.
inline double binary_spin_entropy(double p_exc) { return shannon_term(p_exc) + shannon_term(1.0 - p_exc); }

}  // namespace mott
