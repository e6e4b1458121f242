#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "vacmass/mirror_model.hpp"

namespace vacmass {

using complex = std::complex<double>;

/// Transmission and reflection amplitudes at one frequency.
struct AmplitudePair {
    complex s;
    complex r;
};

/**
 * Lorentzian amplitudes r = -Omega/(Omega - i omega), s = 1 + r.
 *
 * Both are evaluated from x = omega/Omega as r = -1/(1 - ix) and
 * s = -ix/(1 - ix) so that s keeps full relative precision when the mirror
 * is nearly perfectly reflecting.
 */
inline AmplitudePair amplitudes(const MirrorModel& model, double omega)
{
    const double x = model.reduced(omega);
    const complex den(1.0, -x);
    return {complex(0.0, -x) / den, -1.0 / den};
}

/// max(| |s|^2 + |r|^2 - 1 |, |s conj(r) + r conj(s)|)
inline double unitarity_residual(const AmplitudePair& a)
{
    const double norm = std::norm(a.s) + std::norm(a.r) - 1.0;
    const complex cross = a.s * std::conj(a.r) + a.r * std::conj(a.s);
    return std::max(std::abs(norm), std::abs(cross));
}

/// det S[omega] for a mirror at the origin, s^2 - r^2.
inline complex scattering_determinant(const MirrorModel& model, double omega)
{
    const auto a = amplitudes(model, omega);
    return a.s * a.s - a.r * a.r;
}

/**
 * Total phase shift Delta[omega] = arg det S, unwrapped so that Delta[0] = pi
 * and Delta is continuous. For the lorentzian model det S = -(1+ix)/(1-ix),
 * whose continuous argument is pi + 2 atan(x).
 */
inline double phase_shift(const MirrorModel& model, double omega)
{
    return std::numbers::pi + 2.0 * std::atan(model.reduced(omega));
}

/// tau[omega] = Omega/(Omega^2 + omega^2), half the slope of the phase shift.
inline double reflection_delay(const MirrorModel& model, double omega)
{
    const double x = model.reduced(omega);
    return (1.0 / model.omega_c()) / (1.0 + x * x);
}

}  // namespace vacmass
