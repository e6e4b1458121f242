#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "vacmass/mirror_model.hpp"
#include "vacmass/quadrature.hpp"
#include "vacmass/scattering.hpp"

namespace vacmass {

enum class SpectrumComponent { F0F0, F1F1, F0F1, Mass, Field };
enum class SpectrumMethod { Quadrature, ClosedForm, Convolution, Asymptote };

inline std::string_view to_string(SpectrumComponent c)
{
    switch (c) {
    case SpectrumComponent::F0F0: return "f0f0";
    case SpectrumComponent::F1F1: return "f1f1";
    case SpectrumComponent::F0F1: return "f0f1";
    case SpectrumComponent::Mass: return "mass";
    case SpectrumComponent::Field: return "field";
    }
    return "?";
}

inline std::string_view to_string(SpectrumMethod m)
{
    switch (m) {
    case SpectrumMethod::Quadrature: return "quad";
    case SpectrumMethod::ClosedForm: return "closed";
    case SpectrumMethod::Convolution: return "conv";
    case SpectrumMethod::Asymptote: return "asym";
    }
    return "?";
}

/// Spectrum values on a strictly increasing frequency grid.
struct SpectrumSamples {
    std::vector<double> frequencies;
    std::vector<double> values;
    std::vector<double> error_estimates;
    SpectrumComponent component;
    SpectrumMethod method;
    MirrorModel model;
};

/// Below this |omega|/Omega the closed mass spectrum switches to its Taylor series.
inline constexpr double series_switchover = 1e-2;

/**
 * Tolerances used for spectrum integrals unless the caller overrides them.
 * The absolute floor is zero because the spectra span many decades and every
 * comparison against them is relative.
 */
inline QuadratureConfig spectrum_quadrature_config()
{
    return {.rel_tol = 1e-11, .abs_tol = 0.0, .max_depth = 50};
}

inline bool is_force_component(SpectrumComponent c)
{
    return c == SpectrumComponent::F0F0 || c == SpectrumComponent::F1F1 || c == SpectrumComponent::F0F1;
}

/**
 * Force-correlation kernels alpha^{mu nu}[w, w'] from two amplitude pairs:
 *
 *   alpha00 = Re{1 - s s' - r r'},  alpha11 = Re{1 - s s' + r r'},  alpha01 = 0.
 *
 * With s = 1 + r these reduce to Re{s + s' - 2 s s'} and -Re{r + r'}, which is
 * what is evaluated: both forms are free of the cancellation the literal
 * expressions suffer near perfect reflection (alpha00 ~ w^2) and near
 * transparency (alpha11 ~ 1/w^2).
 */
inline double alpha_kernel(SpectrumComponent component, const AmplitudePair& a, const AmplitudePair& b)
{
    switch (component) {
    case SpectrumComponent::F0F0: return std::real(a.s + b.s - 2.0 * a.s * b.s);
    case SpectrumComponent::F1F1: return -(std::real(a.r) + std::real(b.r));
    case SpectrumComponent::F0F1: return 0.0;
    default: throw ValidationError("alpha kernel is only defined for force components");
    }
}

inline double alpha_kernel(const MirrorModel& model, SpectrumComponent component, double omega1, double omega2)
{
    if (!is_force_component(component))
        throw ValidationError("alpha kernel is only defined for force components");
    return alpha_kernel(component, amplitudes(model, omega1), amplitudes(model, omega2));
}

/// C_{F^mu F^nu}[w] = 2 hbar^2 theta(w) int_0^w dw'/2pi w'(w - w') alpha[w', w - w'].
inline QuadratureResult force_spectrum_result(const MirrorModel& model, SpectrumComponent component, double omega,
                                              const QuadratureConfig& cfg = spectrum_quadrature_config())
{
    if (!is_force_component(component)) throw ValidationError("force_spectrum needs f0f0, f1f1 or f0f1");
    if (!(omega > 0.0) || component == SpectrumComponent::F0F1) return {};

    const auto integrand = [&](double w) {
        return w * (omega - w) * alpha_kernel(model, component, w, omega - w);
    };
    auto result = integrate(integrand, 0.0, omega, cfg);
    const double scale = model.hbar() * model.hbar() / std::numbers::pi;
    result.value *= scale;
    result.error_estimate *= scale;
    return result;
}

inline double force_spectrum(const MirrorModel& model, SpectrumComponent component, double omega,
                             const QuadratureConfig& cfg = spectrum_quadrature_config())
{
    return force_spectrum_result(model, component, omega, cfg).value;
}

/// Mass spectrum from the reflection delay alone:
/// 2 hbar^2 theta(w) int_0^w dw'/2pi w'(w - w') tau[w'] tau[w - w'].
inline QuadratureResult mass_spectrum_quadrature(const MirrorModel& model, double omega,
                                                 const QuadratureConfig& cfg = spectrum_quadrature_config())
{
    if (!(omega > 0.0) || model.is_perfect_reflector()) return {};
    const auto integrand = [&](double w) {
        return w * (omega - w) * reflection_delay(model, w) * reflection_delay(model, omega - w);
    };
    auto result = integrate(integrand, 0.0, omega, cfg);
    const double scale = model.hbar() * model.hbar() / std::numbers::pi;
    result.value *= scale;
    result.error_estimate *= scale;
    return result;
}

namespace detail {

// Taylor coefficients c_k of B(x) = (1 + x^2/2) ln(1 + x^2) - x atan(x) = sum_k c_k x^{2k}, k >= 2.
inline double mass_brace_coefficient(int k)
{
    const double sign = (k % 2 == 0) ? -1.0 : 1.0;
    return sign * (1.0 / k - 0.5 / (k - 1) - 1.0 / (2 * k - 1));
}

}  // namespace detail

/**
 * Taylor evaluation of the closed mass spectrum for |omega|/Omega < 0.01,
 * where the braced difference cancels to O(x^4). Six terms leave a relative
 * truncation error below x^12.
 */
inline double mass_spectrum_small_x_series(const MirrorModel& model, double omega)
{
    const double x = model.reduced(omega);
    if (!(std::abs(x) < series_switchover))
        throw ValidationError("small-x series requires |omega|/Omega < " + std::to_string(series_switchover));
    if (!(omega > 0.0) || model.is_perfect_reflector()) return 0.0;

    const double y = x * x;
    double poly = 0.0;
    for (int k = 7; k >= 2; --k) poly = poly * y + detail::mass_brace_coefficient(k);
    // B(x)/x = x^3 * poly
    const double hbar = model.hbar();
    return hbar * hbar * model.omega_c() / (2.0 * std::numbers::pi) * (x * y * poly) / (1.0 + 0.25 * y);
}

/**
 * (hbar^2/2pi) theta(w) Omega^2 / (w (1 + w^2/4Omega^2))
 *   * {(1 + w^2/2Omega^2) ln(1 + w^2/Omega^2) - (w/Omega) atan(w/Omega)}
 *
 * Evaluated directly; callers wanting the stable small-x branch go through
 * mass_spectrum(..., ClosedForm).
 */
inline double mass_spectrum_closed_form_direct(const MirrorModel& model, double omega)
{
    if (!(omega > 0.0) || model.is_perfect_reflector()) return 0.0;
    const double x = model.reduced(omega);
    const double y = x * x;
    const double brace = (1.0 + 0.5 * y) * std::log1p(y) - x * std::atan(x);
    const double hbar = model.hbar();
    return hbar * hbar * model.omega_c() / (2.0 * std::numbers::pi) * brace / (x * (1.0 + 0.25 * y));
}

inline double mass_spectrum_closed_form(const MirrorModel& model, double omega)
{
    if (!(omega > 0.0) || model.is_perfect_reflector()) return 0.0;
    if (model.reduced(omega) < series_switchover) return mass_spectrum_small_x_series(model, omega);
    return mass_spectrum_closed_form_direct(model, omega);
}

/// theta(w) hbar w tau[w] / Omega
inline double field_autocorrelation(const MirrorModel& model, double omega)
{
    if (!(omega > 0.0)) return 0.0;
    return model.hbar() * omega * reflection_delay(model, omega) / model.omega_c();
}

/// C_mm[w] = 2 Omega^2 int dw'/2pi C_phiphi[w'] C_phiphi[w - w'], support [0, w].
inline QuadratureResult mass_spectrum_via_convolution(const MirrorModel& model, double omega,
                                                      const QuadratureConfig& cfg = spectrum_quadrature_config())
{
    if (!(omega > 0.0) || model.is_perfect_reflector()) return {};
    const auto integrand = [&](double w) {
        return field_autocorrelation(model, w) * field_autocorrelation(model, omega - w);
    };
    auto result = integrate(integrand, 0.0, omega, cfg);
    const double scale = model.omega_c() * model.omega_c() / std::numbers::pi;
    result.value *= scale;
    result.error_estimate *= scale;
    return result;
}

/**
 * Leading low-frequency behaviour for the lorentzian model:
 *   F0F0 ~ hbar^2 w^5 / (6 pi Omega^2)   ({(i s'[0])^2 + (i r'[0])^2} = 2/Omega^2)
 *   F1F1 ~ r[0]^2 hbar^2 w^3 / (3 pi)    (r[0] = -1)
 *   MASS ~ hbar^2 w^3 / (6 pi Omega^2)
 */
inline double low_freq_asymptote(const MirrorModel& model, SpectrumComponent component, double omega)
{
    if (component != SpectrumComponent::F0F0 && component != SpectrumComponent::F1F1 &&
        component != SpectrumComponent::Mass)
        throw ValidationError("low-frequency asymptote exists for f0f0, f1f1 and mass only");
    if (!(omega > 0.0)) return 0.0;

    const double h2 = model.hbar() * model.hbar();
    const double x = model.reduced(omega);
    const double w3 = omega * omega * omega;
    switch (component) {
    case SpectrumComponent::F1F1: {
        const double r0 = std::real(amplitudes(model, 0.0).r);
        return r0 * r0 * h2 * w3 / (3.0 * std::numbers::pi);
    }
    case SpectrumComponent::F0F0: return h2 * w3 * x * x / (6.0 * std::numbers::pi);
    default: return h2 * omega * x * x / (6.0 * std::numbers::pi);
    }
}

inline double mass_spectrum(const MirrorModel& model, double omega, SpectrumMethod method,
                            const QuadratureConfig& cfg = spectrum_quadrature_config())
{
    switch (method) {
    case SpectrumMethod::Quadrature: return mass_spectrum_quadrature(model, omega, cfg).value;
    case SpectrumMethod::ClosedForm: return mass_spectrum_closed_form(model, omega);
    case SpectrumMethod::Convolution: return mass_spectrum_via_convolution(model, omega, cfg).value;
    case SpectrumMethod::Asymptote: return low_freq_asymptote(model, SpectrumComponent::Mass, omega);
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Mean induced mass, regularized by an explicit UV cutoff.

/// (hbar Omega / 4pi) ln(1 + Lambda^2/Omega^2)
inline double mean_induced_mass_analytic(const MirrorModel& model, double lambda_cut)
{
    if (std::isnan(lambda_cut) || !(lambda_cut > 0.0)) throw ValidationError("cutoff must be > 0");
    if (model.is_perfect_reflector()) return 0.0;
    const double x = model.reduced(lambda_cut);
    return model.hbar() * model.omega_c() / (4.0 * std::numbers::pi) * std::log1p(x * x);
}

/// int_0^Lambda dw/2pi hbar w tau[w]
inline QuadratureResult mean_induced_mass_quadrature(const MirrorModel& model, double lambda_cut,
                                                     const QuadratureConfig& cfg = spectrum_quadrature_config())
{
    if (std::isnan(lambda_cut) || !(lambda_cut > 0.0)) throw ValidationError("cutoff must be > 0");
    const auto integrand = [&](double w) {
        return model.hbar() * w * reflection_delay(model, w) / (2.0 * std::numbers::pi);
    };
    return integrate_to_cutoff(integrand, lambda_cut, cfg);
}

/// ClosedForm or Quadrature; there is deliberately no cutoff-free overload.
inline double mean_induced_mass(const MirrorModel& model, double lambda_cut,
                                SpectrumMethod method = SpectrumMethod::ClosedForm,
                                const QuadratureConfig& cfg = spectrum_quadrature_config())
{
    switch (method) {
    case SpectrumMethod::ClosedForm: return mean_induced_mass_analytic(model, lambda_cut);
    case SpectrumMethod::Quadrature: return mean_induced_mass_quadrature(model, lambda_cut, cfg).value;
    default: throw ValidationError("mean induced mass supports closed and quad methods");
    }
}

struct VarianceRelation {
    double variance;         ///< int_0^inf dw/2pi of the cutoff-consistent mass spectrum
    double twice_mean_sq;    ///< 2 <dm>^2 at the same cutoff
};

/**
 * Zero-time check of <dm^2> - <dm>^2 = 2 <dm>^2. The field autocorrelation is
 * truncated at Lambda, self-convolved into a mass spectrum (supported on
 * [0, 2 Lambda]) and integrated; the mean is integrated separately.
 */
inline VarianceRelation variance_relation_check(const MirrorModel& model, double lambda_cut,
                                                const QuadratureConfig& cfg = spectrum_quadrature_config())
{
    if (std::isnan(lambda_cut) || !(lambda_cut > 0.0)) throw ValidationError("cutoff must be > 0");
    if (model.is_perfect_reflector()) return {0.0, 0.0};

    const double omega_c = model.omega_c();
    const auto truncated_mass_spectrum = [&](double omega) {
        const double lo = std::max(0.0, omega - lambda_cut);
        const double hi = std::min(omega, lambda_cut);
        if (!(hi > lo)) return 0.0;
        const auto inner = [&](double w) {
            return field_autocorrelation(model, w) * field_autocorrelation(model, omega - w);
        };
        return omega_c * omega_c / std::numbers::pi * integrate(inner, lo, hi, cfg).value;
    };
    QuadratureConfig outer = cfg;
    outer.rel_tol = cfg.rel_tol * 10.0;
    const auto spectral_density = [&](double omega) { return truncated_mass_spectrum(omega) / (2.0 * std::numbers::pi); };
    // The outer integrand has a kink at omega = Lambda where the inner limits switch.
    const double variance = integrate(spectral_density, 0.0, lambda_cut, outer).value +
                            integrate(spectral_density, lambda_cut, 2.0 * lambda_cut, outer).value;

    const double mean = mean_induced_mass_quadrature(model, lambda_cut, cfg).value;
    return {variance, 2.0 * mean * mean};
}

// ---------------------------------------------------------------------------
// Grid evaluation.

inline bool method_supported(SpectrumComponent component, SpectrumMethod method)
{
    switch (method) {
    case SpectrumMethod::Quadrature: return true;
    case SpectrumMethod::ClosedForm:
    case SpectrumMethod::Convolution: return component == SpectrumComponent::Mass;
    case SpectrumMethod::Asymptote:
        return component == SpectrumComponent::F0F0 || component == SpectrumComponent::F1F1 ||
               component == SpectrumComponent::Mass;
    }
    return false;
}

/// One spectrum value with its quadrature error estimate (zero for exact paths).
inline QuadratureResult evaluate_spectrum(const MirrorModel& model, SpectrumComponent component,
                                          SpectrumMethod method, double omega,
                                          const QuadratureConfig& cfg = spectrum_quadrature_config())
{
    if (!method_supported(component, method))
        throw ValidationError(std::string("method ") + std::string(to_string(method)) + " is not available for " +
                              std::string(to_string(component)));
    if (method == SpectrumMethod::Asymptote) return {low_freq_asymptote(model, component, omega), 0.0, 0};
    switch (component) {
    case SpectrumComponent::Field: return {field_autocorrelation(model, omega), 0.0, 0};
    case SpectrumComponent::Mass:
        if (method == SpectrumMethod::Quadrature) return mass_spectrum_quadrature(model, omega, cfg);
        if (method == SpectrumMethod::Convolution) return mass_spectrum_via_convolution(model, omega, cfg);
        return {mass_spectrum_closed_form(model, omega), 0.0, 0};
    default: return force_spectrum_result(model, component, omega, cfg);
    }
}

/**
 * Evaluates a spectrum on a grid. Frequency bins are independent, so they are
 * split into contiguous blocks over `threads` workers; every bin is computed
 * identically regardless of the split. The first failure (by grid index) is
 * rethrown.
 */
inline SpectrumSamples evaluate_on_grid(const MirrorModel& model, SpectrumComponent component, SpectrumMethod method,
                                        std::span<const double> frequencies,
                                        const QuadratureConfig& cfg = spectrum_quadrature_config(),
                                        unsigned threads = 0)
{
    if (!method_supported(component, method))
        throw ValidationError(std::string("method ") + std::string(to_string(method)) + " is not available for " +
                              std::string(to_string(component)));
    for (std::size_t i = 1; i < frequencies.size(); ++i)
        if (!(frequencies[i] > frequencies[i - 1])) throw ValidationError("frequency grid must be strictly increasing");

    const std::size_t n = frequencies.size();
    SpectrumSamples out{std::vector<double>(frequencies.begin(), frequencies.end()),
                        std::vector<double>(n), std::vector<double>(n), component, method, model};
    std::vector<std::exception_ptr> failures(n);

    const auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            try {
                const auto r = evaluate_spectrum(model, component, method, frequencies[i], cfg);
                out.values[i] = r.value;
                out.error_estimates[i] = r.error_estimate;
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    if (threads <= 1) {
        work(0, n);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t block = (n + threads - 1) / threads;
        for (std::size_t begin = 0; begin < n; begin += block)
            pool.emplace_back(work, begin, std::min(n, begin + block));
    }

    for (const auto& failure : failures)
        if (failure) std::rethrow_exception(failure);
    return out;
}

}  // namespace vacmass
