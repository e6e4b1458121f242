#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "vacmass/dynamics.hpp"
#include "vacmass/grid.hpp"
#include "vacmass/scattering.hpp"
#include "vacmass/spectra.hpp"

namespace vacmass {

struct CheckResult {
    std::string name;
    double measured;
    double threshold;
    bool pass;
};

/// Threshold overrides keyed by check name.
using ThresholdOverrides = std::map<std::string, double, std::less<>>;

namespace detail {

class CheckList {
public:
    explicit CheckList(const ThresholdOverrides& overrides) : overrides_(overrides) {}

    /// Records measured <= threshold (or the override for `name`).
    void at_most(std::string name, double measured, double threshold)
    {
        if (const auto it = overrides_.find(name); it != overrides_.end()) threshold = it->second;
        const bool pass = std::isfinite(measured) && measured <= threshold;
        results_.push_back({std::move(name), measured, threshold, pass});
    }

    /// Records measured < threshold.
    void below(std::string name, double measured, double threshold)
    {
        if (const auto it = overrides_.find(name); it != overrides_.end()) threshold = it->second;
        const bool pass = std::isfinite(measured) && measured < threshold;
        results_.push_back({std::move(name), measured, threshold, pass});
    }

    std::vector<CheckResult> take() { return std::move(results_); }

private:
    const ThresholdOverrides& overrides_;
    std::vector<CheckResult> results_;
};

inline double relative_difference(double value, double reference)
{
    if (reference == 0.0) return std::abs(value);
    return std::abs(value - reference) / std::abs(reference);
}

/// Least-squares slope of log(value) against log(omega).
template <class F>
double log_log_slope(const F& spectrum, double lo, double hi, std::size_t points)
{
    const auto grid = log_grid(lo, hi, points);
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (double w : grid) {
        const double x = std::log(w);
        const double y = std::log(spectrum(w));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(points);
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace detail

/// Scattering invariants on a log grid over [1e-3, 1e3] Omega and its mirror image.
inline std::vector<CheckResult> verify_unitarity(const MirrorModel& model, const ThresholdOverrides& overrides = {})
{
    detail::CheckList checks(overrides);
    const double omega_c = model.is_perfect_reflector() ? 1.0 : model.omega_c();
    const auto grid = log_grid(1e-3 * omega_c, 1e3 * omega_c, 1000);

    double unitarity = 0.0, boundary = 0.0, reality = 0.0, delay_even = 0.0;
    double delay_bound = -std::numeric_limits<double>::infinity();
    for (double w : grid) {
        for (double omega : {w, -w}) {
            const auto a = amplitudes(model, omega);
            unitarity = std::max(unitarity, unitarity_residual(a));
            boundary = std::max(boundary, std::abs(a.s - 1.0 - a.r));
        }
        reality = std::max(reality, std::abs(amplitudes(model, -w).r - std::conj(amplitudes(model, w).r)));
        delay_even = std::max(delay_even, std::abs(reflection_delay(model, w) - reflection_delay(model, -w)));
        if (!model.is_perfect_reflector())
            delay_bound = std::max(delay_bound, reflection_delay(model, w) * model.omega_c() - 1.0);
    }
    checks.below("unitarity.residual", unitarity, 1e-12);
    checks.below("unitarity.s_equals_1_plus_r", boundary, 1e-15);
    checks.below("unitarity.reality", reality, 1e-15);
    checks.at_most("unitarity.delay_even", delay_even, 0.0);
    checks.below("unitarity.delay_below_max", delay_bound, 0.0);

    if (!model.is_perfect_reflector()) {
        double fd = 0.0;
        for (double w : log_grid(1e-2 * omega_c, 1e2 * omega_c, 100)) {
            const double h = 1e-5 * std::max(omega_c, std::abs(w));
            const double slope = (phase_shift(model, w + h) - phase_shift(model, w - h)) / (2.0 * h);
            fd = std::max(fd, detail::relative_difference(0.5 * slope, reflection_delay(model, w)));
        }
        checks.below("unitarity.delay_from_phase", fd, 1e-6);
        checks.at_most("unitarity.delay_at_zero", std::abs(reflection_delay(model, 0.0) * omega_c - 1.0), 1e-15);
    }
    return checks.take();
}

/// Closed mass spectrum against its reflection-delay quadrature and the convolution route.
inline std::vector<CheckResult> verify_closedform(const MirrorModel& model, const ThresholdOverrides& overrides = {})
{
    detail::CheckList checks(overrides);
    if (model.is_perfect_reflector()) {
        checks.at_most("closedform.perfect_reflector_zero",
                       std::abs(mass_spectrum(model, 1.0, SpectrumMethod::ClosedForm)), 0.0);
        return checks.take();
    }
    const double omega_c = model.omega_c();
    const auto grid = log_grid(1e-3 * omega_c, 1e3 * omega_c, 400);
    const auto quad = evaluate_on_grid(model, SpectrumComponent::Mass, SpectrumMethod::Quadrature, grid);
    const auto closed = evaluate_on_grid(model, SpectrumComponent::Mass, SpectrumMethod::ClosedForm, grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        worst = std::max(worst, detail::relative_difference(closed.values[i], quad.values[i]));
    checks.below("closedform.quad_vs_closed", worst, 1e-8);

    const auto conv = evaluate_on_grid(model, SpectrumComponent::Mass, SpectrumMethod::Convolution,
                                       log_grid(1e-2 * omega_c, 1e2 * omega_c, 20));
    const auto quad20 = evaluate_on_grid(model, SpectrumComponent::Mass, SpectrumMethod::Quadrature, conv.frequencies);
    double conv_worst = 0.0;
    for (std::size_t i = 0; i < conv.values.size(); ++i)
        conv_worst = std::max(conv_worst, detail::relative_difference(conv.values[i], quad20.values[i]));
    checks.below("closedform.convolution_vs_quad", conv_worst, 1e-8);

    double mm_consistency = 0.0;
    for (double factor : {0.1, 1.0, 10.0}) {
        const double w = factor * omega_c;
        mm_consistency = std::max(
            mm_consistency, detail::relative_difference(force_spectrum(model, SpectrumComponent::F0F0, w),
                                                        w * w * mass_spectrum(model, w, SpectrumMethod::Quadrature)));
    }
    checks.below("closedform.force_equals_w2_mass", mm_consistency, 1e-8);
    return checks.take();
}

/// Quasistatic behaviour below the reflection cutoff.
inline std::vector<CheckResult> verify_asymptotes(const MirrorModel& model, const ThresholdOverrides& overrides = {})
{
    detail::CheckList checks(overrides);
    if (model.is_perfect_reflector()) return checks.take();
    const double omega_c = model.omega_c();

    const auto ratio_at = [&](double factor) {
        const double w = factor * omega_c;
        return mass_spectrum(model, w, SpectrumMethod::Quadrature) /
               low_freq_asymptote(model, SpectrumComponent::Mass, w);
    };
    checks.below("asymptotes.mass_ratio_at_0.01", std::abs(ratio_at(0.01) - 1.0), 1e-4);

    const double w_series = 0.005 * omega_c;
    checks.below("asymptotes.series_vs_quad_at_0.005",
                 detail::relative_difference(mass_spectrum_small_x_series(model, w_series),
                                             mass_spectrum(model, w_series, SpectrumMethod::Quadrature)),
                 1e-6);

    const double f0_slope = detail::log_log_slope(
        [&](double w) { return force_spectrum(model, SpectrumComponent::F0F0, w); }, 1e-3 * omega_c, 1e-2 * omega_c, 11);
    const double f1_slope = detail::log_log_slope(
        [&](double w) { return force_spectrum(model, SpectrumComponent::F1F1, w); }, 1e-3 * omega_c, 1e-2 * omega_c, 11);
    checks.at_most("asymptotes.f0f0_slope", std::abs(f0_slope - 5.0), 0.01);
    checks.at_most("asymptotes.f1f1_slope", std::abs(f1_slope - 3.0), 0.01);
    return checks.take();
}

/// Perfect-reflection and vanishing-delay limits, one-sidedness.
inline std::vector<CheckResult> verify_limits(const MirrorModel& model, const ThresholdOverrides& overrides = {})
{
    detail::CheckList checks(overrides);
    const double hbar = model.hbar();
    const double w = 1.0;
    const MirrorModel stiff(1e4 * w, hbar);

    const double f1 = force_spectrum(stiff, SpectrumComponent::F1F1, w);
    checks.below("limits.f1f1_perfect_reflection", detail::relative_difference(f1, hbar * hbar * w * w * w / (3.0 * std::numbers::pi)), 1e-3);
    const double mass = mass_spectrum(stiff, w, SpectrumMethod::Quadrature);
    checks.below("limits.mass_suppression",
                 std::abs(mass * stiff.omega_c() * stiff.omega_c() * 6.0 * std::numbers::pi / (hbar * hbar * w * w * w) - 1.0),
                 1e-3);
    const double f0 = force_spectrum(stiff, SpectrumComponent::F0F0, w);
    checks.below("limits.f0f0_times_omega2_bounded",
                 std::abs(f0 * stiff.omega_c() * stiff.omega_c() * 6.0 * std::numbers::pi / (hbar * hbar * std::pow(w, 5)) - 1.0),
                 1e-3);

    // C_mm at fixed omega decreases monotonically toward zero as Omega grows.
    double previous = mass_spectrum(MirrorModel(1e1, hbar), w, SpectrumMethod::ClosedForm);
    double rises = 0.0;
    for (double omega_c : {1e2, 1e3, 1e4, 1e5, 1e6}) {
        const double current = mass_spectrum(MirrorModel(omega_c, hbar), w, SpectrumMethod::ClosedForm);
        rises = std::max(rises, current - previous);
        previous = current;
    }
    checks.at_most("limits.mass_decreases_with_omega_c", rises, 0.0);
    checks.below("limits.mass_vanishes", previous / (hbar * hbar * w), 1e-12);

    const auto perfect = MirrorModel::perfect_reflector(hbar);
    checks.at_most("limits.perfect_f0f0_zero", std::abs(force_spectrum(perfect, SpectrumComponent::F0F0, w)), 0.0);
    checks.below("limits.perfect_f1f1",
                 detail::relative_difference(force_spectrum(perfect, SpectrumComponent::F1F1, w),
                                             hbar * hbar / (3.0 * std::numbers::pi)),
                 1e-12);

    double negative = 0.0;
    for (double omega : {-10.0, -1.0, -1e-3, 0.0}) {
        for (auto c : {SpectrumComponent::F0F0, SpectrumComponent::F1F1, SpectrumComponent::F0F1})
            negative = std::max(negative, std::abs(force_spectrum(model, c, omega)));
        for (auto m : {SpectrumMethod::Quadrature, SpectrumMethod::ClosedForm, SpectrumMethod::Convolution,
                       SpectrumMethod::Asymptote})
            negative = std::max(negative, std::abs(mass_spectrum(model, omega, m)));
        negative = std::max(negative, std::abs(field_autocorrelation(model, omega)));
    }
    checks.at_most("limits.one_sided", negative, 0.0);

    double cross = 0.0;
    for (double omega : {0.1, 1.0, 10.0}) cross = std::max(cross, std::abs(force_spectrum(model, SpectrumComponent::F0F1, omega)));
    checks.at_most("limits.f0f1_zero", cross, 0.0);
    return checks.take();
}

/// Relativistic integrator invariants on a short noisy run and the constant-force oracle.
inline std::vector<CheckResult> verify_dispersion(const MirrorModel& model, const ThresholdOverrides& overrides = {})
{
    detail::CheckList checks(overrides);
    SimulationConfig cfg;
    cfg.model = model;
    cfg.m_bare = 1.0;
    const double omega_c = model.is_perfect_reflector() ? 1.0 : model.omega_c();
    cfg.noise_band = {0.0, 5.0 * omega_c};
    cfg.dt = 0.1 / cfg.noise_band.hi;
    cfg.steps = 1 << 14;
    cfg.seed = 12345;
    cfg.mass_channel = true;
    cfg.record_stride = 1;
    const auto run = run_trajectory(cfg);
    checks.below("dispersion.max_speed", run.diagnostics.max_speed, 1.0);
    checks.below("dispersion.causal_steps", run.diagnostics.max_step_ratio, 1.0);
    checks.below("dispersion.residual", run.diagnostics.max_dispersion_residual, 1e-12);
    double below_bare = 0.0;
    for (const auto& s : run.states) below_bare = std::max(below_bare, cfg.m_bare - s.m);
    checks.at_most("dispersion.mass_at_least_bare", below_bare, 0.0);

    SimulationConfig constant = cfg;
    constant.mass_channel = false;
    constant.constant_force = 1.0;
    constant.dt = 1e-3;
    constant.steps = 1000;
    const auto push = run_trajectory(constant);
    const double T = static_cast<double>(constant.steps) * constant.dt;
    const double expected = T / std::sqrt(1.0 + T * T);
    checks.below("dispersion.constant_force_velocity", std::abs(push.states.back().velocity() - expected), 1e-6);
    return checks.take();
}

inline const std::vector<std::string_view>& verify_suite_names()
{
    static const std::vector<std::string_view> names{"unitarity", "closedform", "asymptotes", "limits", "dispersion"};
    return names;
}

/// Runs one suite by name, or every suite for "all".
inline std::vector<CheckResult> run_verify_suite(std::string_view suite, const MirrorModel& model,
                                                 const ThresholdOverrides& overrides = {})
{
    if (suite == "unitarity") return verify_unitarity(model, overrides);
    if (suite == "closedform") return verify_closedform(model, overrides);
    if (suite == "asymptotes") return verify_asymptotes(model, overrides);
    if (suite == "limits") return verify_limits(model, overrides);
    if (suite == "dispersion") return verify_dispersion(model, overrides);
    if (suite == "all") {
        std::vector<CheckResult> all;
        for (auto name : verify_suite_names()) {
            auto part = run_verify_suite(name, model, overrides);
            all.insert(all.end(), part.begin(), part.end());
        }
        return all;
    }
    throw ValidationError("unknown verify suite '" + std::string(suite) + "'");
}

}  // namespace vacmass
