#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace vacmass {

/// Raised when a model or configuration violates its invariants.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical procedure cannot deliver its contract.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Pointlike mirror with lorentzian reflectivity.
 *
 * omega_c is the reflection cutoff (the constant response of the source to
 * the local field). An infinite cutoff is accepted and represents the
 * perfect reflector (s = 0, r = -1 at every frequency, zero delay).
 */
class MirrorModel {
public:
    explicit MirrorModel(double omega_c, double hbar = 1.0) : omega_c_(omega_c), hbar_(hbar)
    {
        if (std::isnan(omega_c) || !(omega_c > 0.0))
            throw ValidationError("omega_c must be > 0, got " + std::to_string(omega_c));
        if (!std::isfinite(hbar) || !(hbar > 0.0))
            throw ValidationError("hbar must be finite and > 0, got " + std::to_string(hbar));
    }

    static MirrorModel perfect_reflector(double hbar = 1.0)
    {
        return MirrorModel(std::numeric_limits<double>::infinity(), hbar);
    }

    double omega_c() const noexcept { return omega_c_; }
    double hbar() const noexcept { return hbar_; }
    bool is_perfect_reflector() const noexcept { return std::isinf(omega_c_); }

    /// Dimensionless frequency omega / omega_c.
    double reduced(double omega) const noexcept { return omega / omega_c_; }

    bool operator==(const MirrorModel&) const = default;

private:
    double omega_c_;
    double hbar_;
};

}  // namespace vacmass
