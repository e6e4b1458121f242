#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "vacmass/mirror_model.hpp"
#include "vacmass/spectra.hpp"

namespace vacmass {

namespace detail {

// FFTW planning is not thread-safe; execution of distinct plans is.
inline std::mutex& fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

/// Real <-> half-complex transform pair of one length, owning its buffers.
class RealFft {
public:
    explicit RealFft(std::size_t n) : n_(n)
    {
        real_ = static_cast<double*>(fftw_malloc(sizeof(double) * n));
        spectrum_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
        if (real_ == nullptr || spectrum_ == nullptr) {
            release();
            throw NumericalError("fftw_malloc failed");
        }
        std::lock_guard lock(fftw_planner_mutex());
        forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), real_, spectrum_, FFTW_ESTIMATE);
        inverse_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), spectrum_, real_, FFTW_ESTIMATE);
    }
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;
    ~RealFft() { release(); }

    std::size_t size() const noexcept { return n_; }
    std::span<double> real() noexcept { return {real_, n_}; }
    std::span<std::complex<double>> spectrum() noexcept
    {
        return {reinterpret_cast<std::complex<double>*>(spectrum_), n_ / 2 + 1};
    }

    /// spectrum[k] = sum_j real[j] exp(-2 pi i jk/n)
    void forward() { fftw_execute(forward_); }
    /// real[j] = sum_k spectrum[k] exp(+2 pi i jk/n) over the full hermitian extension (unnormalized).
    /// Destroys the contents of spectrum().
    void inverse() { fftw_execute(inverse_); }

private:
    void release()
    {
        {
            std::lock_guard lock(fftw_planner_mutex());
            if (forward_) fftw_destroy_plan(forward_);
            if (inverse_) fftw_destroy_plan(inverse_);
        }
        forward_ = inverse_ = nullptr;
        if (real_) fftw_free(real_);
        if (spectrum_) fftw_free(spectrum_);
        real_ = nullptr;
        spectrum_ = nullptr;
    }

    std::size_t n_;
    double* real_ = nullptr;
    fftw_complex* spectrum_ = nullptr;
    fftw_plan forward_ = nullptr;
    fftw_plan inverse_ = nullptr;
};

}  // namespace detail

inline bool is_power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

/// Frequency window [lo, hi] (inclusive) outside which a synthesized spectrum is zero.
struct FrequencyBand {
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();

    bool contains(double omega) const noexcept { return omega >= lo && omega <= hi; }

    void validate() const
    {
        if (std::isnan(lo) || std::isnan(hi) || lo < 0.0 || !(hi >= lo))
            throw ValidationError("frequency band needs 0 <= lo <= hi");
    }
};

/// A stationary Gaussian realization together with what generated it.
struct NoiseSeries {
    double dt = 0.0;
    std::vector<double> samples;
    SpectrumComponent component = SpectrumComponent::F1F1;
    MirrorModel model{1.0};
    std::uint64_t seed = 0;
    FrequencyBand band;
};

/// One-sided target spectrum used for synthesis at a single frequency.
inline double synthesis_spectrum(const MirrorModel& model, SpectrumComponent component, double omega,
                                 const QuadratureConfig& cfg = spectrum_quadrature_config())
{
    switch (component) {
    case SpectrumComponent::Mass: return mass_spectrum_closed_form(model, omega);
    case SpectrumComponent::Field: return field_autocorrelation(model, omega);
    default: return force_spectrum(model, component, omega, cfg);
    }
}

/// Positive FFT bin frequencies 2 pi k / (n dt), k = 1 .. n/2.
inline std::vector<double> fft_bin_frequencies(std::size_t n, double dt)
{
    std::vector<double> omega(n / 2);
    const double spacing = 2.0 * std::numbers::pi / (static_cast<double>(n) * dt);
    for (std::size_t k = 1; k <= n / 2; ++k) omega[k - 1] = spacing * static_cast<double>(k);
    return omega;
}

/**
 * Frequency-domain shaping of white Gaussian noise.
 *
 * The classical series targets the symmetrized spectrum (C[w] + C[-w])/2 =
 * C[|w|]/2 of the one-sided vacuum spectrum C. Each positive bin receives an
 * independent complex Gaussian coefficient with E|X_k|^2 = S_k n/dt, the
 * Nyquist bin a real one, the DC bin zero; the result is inverse transformed
 * so that E[x^2] = (2 sum_{0<k<n/2} S_k + S_{n/2}) / (n dt).
 *
 * Bins outside `band` carry no power. The random stream is consumed the same
 * way for every band, so a given seed always yields the same white noise.
 */
inline NoiseSeries synthesize_noise(const MirrorModel& model, SpectrumComponent component, std::size_t n, double dt,
                                    std::uint64_t seed, FrequencyBand band = {},
                                    const QuadratureConfig& cfg = spectrum_quadrature_config())
{
    if (!is_power_of_two(n)) throw ValidationError("noise length must be a power of two >= 2");
    if (!std::isfinite(dt) || !(dt > 0.0)) throw ValidationError("dt must be finite and > 0");
    band.validate();

    const auto omega = fft_bin_frequencies(n, dt);
    std::vector<double> in_band;
    std::size_t first = omega.size();
    for (std::size_t k = 0; k < omega.size(); ++k) {
        if (band.contains(omega[k])) {
            if (first == omega.size()) first = k;
            in_band.push_back(omega[k]);
        }
    }

    std::vector<double> target(omega.size(), 0.0);
    if (!in_band.empty()) {
        const auto method =
            component == SpectrumComponent::Mass ? SpectrumMethod::ClosedForm : SpectrumMethod::Quadrature;
        const auto samples = evaluate_on_grid(model, component, method, in_band, cfg);
        for (std::size_t i = 0; i < in_band.size(); ++i) target[first + i] = samples.values[i];
    }

    detail::RealFft fft(n);
    auto coeffs = fft.spectrum();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double bin_scale = static_cast<double>(n) / dt;

    coeffs[0] = 0.0;
    for (std::size_t k = 1; k < n / 2; ++k) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        const double amplitude = std::sqrt(0.5 * target[k - 1] * bin_scale * 0.5);
        coeffs[k] = {amplitude * re, amplitude * im};
    }
    coeffs[n / 2] = std::sqrt(0.5 * target[n / 2 - 1] * bin_scale) * gauss(rng);

    fft.inverse();
    NoiseSeries out{dt, std::vector<double>(n), component, model, seed, band};
    const auto real = fft.real();
    const double norm = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) out.samples[j] = real[j] * norm;
    return out;
}

/// Two-sided power spectral density estimate on bins 2 pi k / (L dt), k = 0 .. L/2.
struct WelchEstimate {
    std::vector<double> frequencies;
    std::vector<double> density;
    std::size_t segments = 0;
};

/**
 * Welch's averaged periodogram with a Hann window and 50% overlap.
 * Normalized so that E[density] equals the two-sided spectrum S with
 * E[x^2] = int dw/2pi S(w).
 */
inline WelchEstimate welch_psd(std::span<const double> samples, double dt, std::size_t segment_length)
{
    if (segment_length < 2 || segment_length > samples.size())
        throw ValidationError("segment length must lie in [2, number of samples]");
    if (!(dt > 0.0)) throw ValidationError("dt must be > 0");

    const std::size_t hop = segment_length / 2;
    std::vector<double> window(segment_length);
    double window_power = 0.0;
    for (std::size_t j = 0; j < segment_length; ++j) {
        const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(j) /
                                              static_cast<double>(segment_length));
        window[j] = w;
        window_power += w * w;
    }

    WelchEstimate out;
    out.density.assign(segment_length / 2 + 1, 0.0);
    out.frequencies.resize(segment_length / 2 + 1);
    for (std::size_t k = 0; k < out.frequencies.size(); ++k)
        out.frequencies[k] = 2.0 * std::numbers::pi * static_cast<double>(k) /
                             (static_cast<double>(segment_length) * dt);

    detail::RealFft fft(segment_length);
    for (std::size_t start = 0; start + segment_length <= samples.size(); start += hop) {
        auto buf = fft.real();
        for (std::size_t j = 0; j < segment_length; ++j) buf[j] = window[j] * samples[start + j];
        fft.forward();
        const auto spec = fft.spectrum();
        for (std::size_t k = 0; k < spec.size(); ++k) out.density[k] += std::norm(spec[k]);
        ++out.segments;
    }
    const double scale = dt / (window_power * static_cast<double>(out.segments));
    for (auto& d : out.density) d *= scale;
    return out;
}

/**
 * Mean over Welch bins in [lo, hi] of estimate / target, where target is the
 * two-sided symmetrized spectrum. 1 means perfect fidelity.
 */
template <class Target>
double periodogram_band_ratio(const WelchEstimate& estimate, const Target& two_sided_target, double lo, double hi)
{
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < estimate.frequencies.size(); ++k) {
        const double w = estimate.frequencies[k];
        if (w < lo || w > hi) continue;
        const double t = two_sided_target(w);
        if (!(t > 0.0)) continue;
        sum += estimate.density[k] / t;
        ++count;
    }
    if (count == 0) throw ValidationError("no Welch bins with positive target inside the band");
    return sum / static_cast<double>(count);
}

}  // namespace vacmass
