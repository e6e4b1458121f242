#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "vacmass/mirror_model.hpp"
#include "vacmass/noise.hpp"
#include "vacmass/spectra.hpp"

namespace vacmass {

/// Scatterer phase-space point. Energy and velocity are derived, never stored.
struct TrajectoryState {
    double t = 0.0;
    double q = 0.0;
    double p = 0.0;  ///< spatial momentum p^1
    double m = 1.0;  ///< instantaneous mass m_bare + dm

    double energy() const noexcept { return std::hypot(p, m); }
    double velocity() const noexcept { return p / energy(); }

    /// |e^2 - p^2 - m^2| / e^2
    double dispersion_residual() const noexcept
    {
        const double e = energy();
        return std::abs(e * e - p * p - m * m) / (e * e);
    }

    bool operator==(const TrajectoryState&) const = default;
};

/**
 * One kick-drift step of d/dt(m v / sqrt(1 - v^2)) = F in momentum form:
 *
 *   p <- p + F dt,  m <- m_bare + dm_next,  q <- q + dt p / sqrt(p^2 + m^2).
 *
 * Since the drift velocity is p/sqrt(p^2 + m^2) with m > 0, |v| < 1 holds by
 * construction.
 */
inline TrajectoryState step(const TrajectoryState& state, double force, double m_bare, double dm_next, double dt)
{
    if (!(state.m > 0.0)) throw ValidationError("step requires a positive mass");
    if (!(dt > 0.0)) throw ValidationError("step requires dt > 0");
    const double m_next = m_bare + dm_next;
    if (!(m_next > 0.0)) throw NumericalError("updated mass is not positive");

    TrajectoryState next;
    next.t = state.t + dt;
    next.p = state.p + force * dt;
    next.m = m_next;
    next.q = state.q + dt * next.p / std::hypot(next.p, next.m);
    return next;
}

/// Newtonian counterpart: p <- p + F dt, q <- q + (p/m) dt.
inline TrajectoryState newtonian_step(const TrajectoryState& state, double force, double m_bare, double dm_next,
                                      double dt)
{
    if (!(state.m > 0.0)) throw ValidationError("step requires a positive mass");
    if (!(dt > 0.0)) throw ValidationError("step requires dt > 0");
    const double m_next = m_bare + dm_next;
    if (!(m_next > 0.0)) throw NumericalError("updated mass is not positive");

    TrajectoryState next;
    next.t = state.t + dt;
    next.p = state.p + force * dt;
    next.m = m_next;
    next.q = state.q + dt * next.p / next.m;
    return next;
}

struct SimulationConfig {
    MirrorModel model{1.0};
    double m_bare = 1.0;
    double dt = 0.01;
    std::size_t steps = 1000;
    std::uint64_t seed = 0;
    bool mass_channel = false;
    FrequencyBand noise_band{0.0, 10.0};
    SpectrumComponent force_component = SpectrumComponent::F1F1;
    double noise_scale = 1.0;
    /// Replaces the synthesized force by a constant when set.
    std::optional<double> constant_force;
    double q0 = 0.0;
    double p0 = 0.0;
    std::size_t record_stride = 1;

    bool force_noise_active() const { return !constant_force && noise_scale != 0.0; }

    void validate() const
    {
        if (!std::isfinite(m_bare) || !(m_bare > 0.0)) throw ValidationError("m_bare must be > 0");
        if (!std::isfinite(dt) || !(dt > 0.0)) throw ValidationError("dt must be > 0");
        if (steps < 1) throw ValidationError("steps must be >= 1");
        if (record_stride < 1) throw ValidationError("record stride must be >= 1");
        if (!std::isfinite(noise_scale)) throw ValidationError("noise scale must be finite");
        if (!is_force_component(force_component) && force_component != SpectrumComponent::Mass &&
            force_component != SpectrumComponent::Field)
            throw ValidationError("unknown force component");
        noise_band.validate();
        if ((force_noise_active() || mass_channel) && dt * noise_band.hi > 0.1)
            throw ValidationError("resolution bound violated: dt * omega_max must be <= 0.1");
    }
};

/// Precomputed force and induced-mass series driving a trajectory.
struct Forcing {
    std::vector<double> force;  ///< force[i] acts during step i
    std::vector<double> dm;     ///< dm[i] is the induced mass at time i dt
};

/// Independent stream for the field channel, derived from the trajectory seed.
inline std::uint64_t field_channel_seed(std::uint64_t seed)
{
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::size_t noise_length_for(std::size_t samples)
{
    std::size_t n = 2;
    while (n < samples) n *= 2;
    return n;
}

/**
 * Builds the forcing for cfg. The force series is precomputed and does not
 * respond to the trajectory. With the mass channel on, a field series with
 * the local-field spectrum is synthesized from an independent seed and
 * dm = Omega phi^2.
 */
inline Forcing build_forcing(const SimulationConfig& cfg)
{
    cfg.validate();
    const std::size_t n = noise_length_for(cfg.steps + 1);
    Forcing out{std::vector<double>(cfg.steps, 0.0), std::vector<double>(cfg.steps + 1, 0.0)};

    if (cfg.constant_force) {
        std::fill(out.force.begin(), out.force.end(), *cfg.constant_force);
    } else if (cfg.noise_scale != 0.0) {
        const auto noise = synthesize_noise(cfg.model, cfg.force_component, n, cfg.dt, cfg.seed, cfg.noise_band);
        for (std::size_t i = 0; i < cfg.steps; ++i) out.force[i] = cfg.noise_scale * noise.samples[i];
    }

    if (cfg.mass_channel && !cfg.model.is_perfect_reflector()) {
        const auto field = synthesize_noise(cfg.model, SpectrumComponent::Field, n, cfg.dt,
                                            field_channel_seed(cfg.seed), cfg.noise_band);
        for (std::size_t i = 0; i <= cfg.steps; ++i)
            out.dm[i] = cfg.model.omega_c() * field.samples[i] * field.samples[i];
    }
    return out;
}

/// Band-consistent mean induced mass: int over [lo, hi] of dw/2pi hbar w tau[w].
inline double band_mean_induced_mass(const MirrorModel& model, const FrequencyBand& band)
{
    if (model.is_perfect_reflector() || !(band.hi > 0.0)) return 0.0;
    const double upper = mean_induced_mass_analytic(model, band.hi);
    const double lower = band.lo > 0.0 ? mean_induced_mass_analytic(model, band.lo) : 0.0;
    return upper - lower;
}

struct TrajectoryDiagnostics {
    double max_speed = 0.0;
    double max_dispersion_residual = 0.0;
    double max_step_ratio = 0.0;  ///< max |q(t+dt) - q(t)| / dt
    double momentum_variance = 0.0;
    double mass_mean = 0.0;       ///< time average of dm
    double mass_mean_prediction = 0.0;
    std::optional<double> periodogram_fit;  ///< Welch / target ratio in the mid band
    std::size_t steps = 0;
};

struct TrajectoryResult {
    std::vector<TrajectoryState> states;  ///< initial state, then every record_stride-th step
    TrajectoryDiagnostics diagnostics;
};

namespace detail {

inline std::optional<double> force_periodogram_fit(const SimulationConfig& cfg, std::span<const double> force)
{
    if (!cfg.force_noise_active() || cfg.noise_scale == 0.0) return std::nullopt;
    // Largest power-of-two segment giving at least 100 half-overlapping segments.
    const auto segments_for = [&](std::size_t length) {
        return length > force.size() ? std::size_t{0} : (force.size() - length) / (length / 2) + 1;
    };
    std::size_t segment = 4;
    if (segments_for(segment) < 100) return std::nullopt;
    while (segments_for(2 * segment) >= 100) segment *= 2;

    const auto estimate = welch_psd(force, cfg.dt, segment);
    const double resolution = estimate.frequencies[1];
    const double width = cfg.noise_band.hi - cfg.noise_band.lo;
    const double lo = std::max(cfg.noise_band.lo + 0.1 * width, 3.0 * resolution);
    const double hi = cfg.noise_band.hi - 0.1 * width;
    if (!(hi > lo)) return std::nullopt;
    const double scale2 = cfg.noise_scale * cfg.noise_scale;
    const auto target = [&](double omega) {
        return scale2 * 0.5 * synthesis_spectrum(cfg.model, cfg.force_component, omega, spectrum_quadrature_config());
    };
    try {
        return periodogram_band_ratio(estimate, target, lo, hi);
    } catch (const ValidationError&) {
        return std::nullopt;
    }
}

template <class Stepper>
TrajectoryResult integrate_trajectory(const SimulationConfig& cfg, const Forcing& forcing, const Stepper& stepper)
{
    TrajectoryResult out;
    TrajectoryState state{0.0, cfg.q0, cfg.p0, cfg.m_bare + forcing.dm[0]};
    out.states.reserve(cfg.steps / cfg.record_stride + 2);
    out.states.push_back(state);

    auto& d = out.diagnostics;
    d.steps = cfg.steps;
    d.max_speed = std::abs(state.velocity());
    d.max_dispersion_residual = state.dispersion_residual();

    // Welford accumulators over all steps (not only recorded ones).
    double p_mean = 0.0;
    double p_m2 = 0.0;
    double dm_sum = 0.0;
    for (std::size_t i = 0; i < cfg.steps; ++i) {
        const TrajectoryState next = stepper(state, forcing.force[i], cfg.m_bare, forcing.dm[i + 1], cfg.dt);
        d.max_step_ratio = std::max(d.max_step_ratio, std::abs(next.q - state.q) / cfg.dt);
        d.max_speed = std::max(d.max_speed, std::abs(next.velocity()));
        d.max_dispersion_residual = std::max(d.max_dispersion_residual, next.dispersion_residual());
        const double delta = next.p - p_mean;
        p_mean += delta / static_cast<double>(i + 1);
        p_m2 += delta * (next.p - p_mean);
        dm_sum += forcing.dm[i + 1];
        state = next;
        if ((i + 1) % cfg.record_stride == 0 || i + 1 == cfg.steps) out.states.push_back(state);
    }
    d.momentum_variance = cfg.steps > 1 ? p_m2 / static_cast<double>(cfg.steps - 1) : 0.0;
    d.mass_mean = dm_sum / static_cast<double>(cfg.steps);
    d.mass_mean_prediction = cfg.mass_channel ? band_mean_induced_mass(cfg.model, cfg.noise_band) : 0.0;
    d.periodogram_fit = force_periodogram_fit(cfg, forcing.force);
    return out;
}

}  // namespace detail

inline TrajectoryResult run_trajectory(const SimulationConfig& cfg)
{
    const Forcing forcing = build_forcing(cfg);
    return detail::integrate_trajectory(cfg, forcing, step);
}

struct TrajectoryComparison {
    TrajectoryResult relativistic;
    TrajectoryResult newtonian;
    double max_position_discrepancy = 0.0;       ///< max |q_rel - q_newton| over recorded states
    double final_velocity_discrepancy = 0.0;     ///< |v_newton - v_rel| / |v_newton| at the last state
};

/// Integrates the same forcing with the relativistic and the Newtonian update.
inline TrajectoryComparison nonrelativistic_comparison(const SimulationConfig& cfg)
{
    const Forcing forcing = build_forcing(cfg);
    TrajectoryComparison out{detail::integrate_trajectory(cfg, forcing, step),
                             detail::integrate_trajectory(cfg, forcing, newtonian_step)};
    const auto& rel = out.relativistic.states;
    const auto& newt = out.newtonian.states;
    for (std::size_t i = 0; i < rel.size(); ++i)
        out.max_position_discrepancy = std::max(out.max_position_discrepancy, std::abs(rel[i].q - newt[i].q));
    const double v_newton = newt.back().p / newt.back().m;
    const double v_rel = rel.back().velocity();
    out.final_velocity_discrepancy = v_newton != 0.0 ? std::abs(v_newton - v_rel) / std::abs(v_newton)
                                                     : std::abs(v_rel);
    return out;
}

/**
 * Runs cfg once per seed, in parallel over seeds. Results are ordered like
 * `seeds` and do not depend on the thread count.
 */
inline std::vector<TrajectoryResult> run_ensemble(const SimulationConfig& cfg, std::span<const std::uint64_t> seeds,
                                                  unsigned threads = 0)
{
    std::vector<TrajectoryResult> results(seeds.size());
    std::vector<std::exception_ptr> failures(seeds.size());
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(seeds.size(), 1)));

    const auto work = [&](std::size_t worker) {
        for (std::size_t i = worker; i < seeds.size(); i += threads) {
            try {
                SimulationConfig local = cfg;
                local.seed = seeds[i];
                results[i] = run_trajectory(local);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    }
    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);
    return results;
}

}  // namespace vacmass
