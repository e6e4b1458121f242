#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "vacmass/grid.hpp"
#include "vacmass/spectra.hpp"

using namespace vacmass;
using std::numbers::pi;

namespace {

// Kernels written from the amplitudes without using s = 1 + r.
double literal_alpha00(const AmplitudePair& a, const AmplitudePair& b)
{
    return std::real(1.0 - a.s * b.s - a.r * b.r);
}

double literal_alpha11(const AmplitudePair& a, const AmplitudePair& b)
{
    return std::real(1.0 - a.s * b.s + a.r * b.r);
}

// Exact F1F1 spectrum of the lorentzian mirror (antiderivative of the kernel).
double f1f1_exact(double omega, double omega_c, double hbar)
{
    const double x = omega / omega_c;
    return 2.0 * hbar * hbar * std::pow(omega_c, 3) / pi * (0.5 * x * std::log1p(x * x) - x + std::atan(x));
}

// Frozen 30-digit reference values of C_mm / (hbar^2 w^3 / 6 pi Omega^2).
constexpr double mass_ratio_at_0_05 = 0.998502050599931;
constexpr double mass_ratio_at_0_01 = 0.99994000328552;
constexpr double mass_spectrum_at_1 = 0.0323813600915909560;

}  // namespace

TEST(AlphaKernel, ReducedFormsMatchLiteralExpressions)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    const MirrorModel m(1.3);
    for (int i = 0; i < 2000; ++i) {
        const auto a = amplitudes(m, u(rng));
        const auto b = amplitudes(m, u(rng));
        EXPECT_NEAR(alpha_kernel(SpectrumComponent::F0F0, a, b), literal_alpha00(a, b), 1e-14);
        EXPECT_NEAR(alpha_kernel(SpectrumComponent::F1F1, a, b), literal_alpha11(a, b), 1e-14);
        EXPECT_EQ(alpha_kernel(SpectrumComponent::F0F1, a, b), 0.0);
    }
}

TEST(AlphaKernel, LorentzianDelayIdentity)
{
    const MirrorModel m(1.0);
    for (double w1 : log_grid(1e-3, 1e3, 30))
        for (double w2 : log_grid(1e-3, 1e3, 30)) {
            const double ref = (w1 + w2) * (w1 + w2) * reflection_delay(m, w1) * reflection_delay(m, w2);
            EXPECT_NEAR(alpha_kernel(m, SpectrumComponent::F0F0, w1, w2), ref, 1e-12 * std::max(1.0, ref));
        }
}

TEST(AlphaKernel, RejectsNonForceComponents)
{
    EXPECT_THROW(alpha_kernel(MirrorModel(1.0), SpectrumComponent::Mass, 1.0, 1.0), ValidationError);
}

TEST(ForceSpectrum, F0F1Vanishes)
{
    for (double w : {0.1, 1.0, 10.0}) EXPECT_EQ(force_spectrum(MirrorModel(1.0), SpectrumComponent::F0F1, w), 0.0);
}

TEST(ForceSpectrum, OneSided)
{
    for (auto c : {SpectrumComponent::F0F0, SpectrumComponent::F1F1, SpectrumComponent::F0F1}) {
        EXPECT_EQ(force_spectrum(MirrorModel(1.0), c, -1.0), 0.0);
        EXPECT_EQ(force_spectrum(MirrorModel(1.0), c, 0.0), 0.0);
    }
}

TEST(ForceSpectrum, F1F1MatchesExactAntiderivative)
{
    for (double omega_c : {0.5, 1.0, 4.0})
        for (double w : log_grid(1e-2, 1e2, 25)) {
            const double exact = f1f1_exact(w, omega_c, 1.0);
            EXPECT_NEAR(force_spectrum(MirrorModel(omega_c), SpectrumComponent::F1F1, w) / exact, 1.0, 1e-9) << w;
        }
}

TEST(ForceSpectrum, F0F0IsOmegaSquaredTimesMass)
{
    const MirrorModel m(1.0);
    EXPECT_NEAR(force_spectrum(m, SpectrumComponent::F0F0, 1.0), mass_spectrum_at_1, 1e-12);
    for (double w : {0.03, 0.7, 12.0})
        EXPECT_NEAR(force_spectrum(m, SpectrumComponent::F0F0, w) / (w * w * mass_spectrum_closed_form(m, w)), 1.0,
                    1e-9);
}

TEST(ForceSpectrum, ScalesWithHbarSquared)
{
    const double base = force_spectrum(MirrorModel(1.0, 1.0), SpectrumComponent::F1F1, 0.8);
    EXPECT_NEAR(force_spectrum(MirrorModel(1.0, 3.0), SpectrumComponent::F1F1, 0.8) / base, 9.0, 1e-10);
}

TEST(ForceSpectrum, PerfectReflectionLimit)
{
    const double w = 1.0;
    const MirrorModel m(1e4 * w);
    EXPECT_NEAR(force_spectrum(m, SpectrumComponent::F1F1, w) / (w * w * w / (3.0 * pi)), 1.0, 1e-3);
    const auto perfect = MirrorModel::perfect_reflector();
    EXPECT_NEAR(force_spectrum(perfect, SpectrumComponent::F1F1, w) / (w * w * w / (3.0 * pi)), 1.0, 1e-12);
    EXPECT_EQ(force_spectrum(perfect, SpectrumComponent::F0F0, w), 0.0);
}

TEST(MassSpectrum, SpotValueAtCutoff)
{
    const MirrorModel m(1.0);
    const double hand = 0.5 / pi * 0.8 * (1.5 * std::log(2.0) - pi / 4.0);
    EXPECT_NEAR(mass_spectrum_closed_form(m, 1.0), hand, 1e-16);
    EXPECT_NEAR(mass_spectrum_closed_form(m, 1.0), mass_spectrum_at_1, 1e-16);
    EXPECT_NEAR(mass_spectrum_quadrature(m, 1.0).value, mass_spectrum_at_1, 1e-14);
    EXPECT_NEAR(mass_spectrum_via_convolution(m, 1.0).value, mass_spectrum_at_1, 1e-13);
}

TEST(MassSpectrum, OneSided)
{
    const MirrorModel m(1.0);
    for (auto method : {SpectrumMethod::Quadrature, SpectrumMethod::ClosedForm, SpectrumMethod::Convolution}) {
        EXPECT_EQ(mass_spectrum(m, 0.0, method), 0.0);
        EXPECT_EQ(mass_spectrum(m, -1.0, method), 0.0);
    }
}

TEST(MassSpectrum, LowFrequencyRatiosAgainstFrozenReference)
{
    const MirrorModel m(1.0);
    const auto ratio = [&](double w) {
        return mass_spectrum_closed_form(m, w) / low_freq_asymptote(m, SpectrumComponent::Mass, w);
    };
    EXPECT_NEAR(ratio(0.05), mass_ratio_at_0_05, 1e-13);
    // 0.01 is the first point on the direct branch, whose rounding error is about 3 eps / x^2.
    EXPECT_NEAR(ratio(0.01), mass_ratio_at_0_01, 2e-11);
    EXPECT_NEAR(ratio(0.0099), 0.999941197156065, 1e-14);
    EXPECT_NEAR(ratio(0.01), 1.0, 5e-4);
}

TEST(MassSpectrum, SeriesAgreesWithDirectFormNearSwitchover)
{
    const MirrorModel m(1.0);
    for (double w : {0.002, 0.005, 0.0099}) {
        EXPECT_NEAR(mass_spectrum_small_x_series(m, w) / mass_spectrum_quadrature(m, w).value, 1.0, 1e-9) << w;
    }
    // Just above the switchover the direct form still holds to about 1e-9.
    EXPECT_NEAR(mass_spectrum_closed_form(m, 0.0101) / mass_spectrum_quadrature(m, 0.0101).value, 1.0, 1e-8);
    EXPECT_THROW(mass_spectrum_small_x_series(m, 0.02), ValidationError);
}

TEST(MassSpectrum, LeadingBehaviourAtSmallFrequency)
{
    EXPECT_NEAR(mass_spectrum_closed_form(MirrorModel(1.0), 1e-3) / (1e-9 / (6.0 * pi)), 1.0, 1e-5);
    EXPECT_NEAR(mass_spectrum_closed_form(MirrorModel(1.0), 0.005) / mass_spectrum_quadrature(MirrorModel(1.0), 0.005).value,
                1.0, 1e-6);
}

TEST(MassSpectrum, ConvolutionMatchesQuadrature)
{
    const MirrorModel m(1.0);
    EXPECT_NEAR(mass_spectrum_via_convolution(m, 5.0).value / mass_spectrum_quadrature(m, 5.0).value, 1.0, 1e-8);
}

TEST(MassSpectrum, VanishesForPerfectReflector)
{
    const auto perfect = MirrorModel::perfect_reflector();
    for (auto method : {SpectrumMethod::Quadrature, SpectrumMethod::ClosedForm, SpectrumMethod::Convolution})
        EXPECT_EQ(mass_spectrum(perfect, 1.0, method), 0.0);
    double previous = mass_spectrum_closed_form(MirrorModel(1.0), 1.0);
    for (double omega_c : {10.0, 100.0, 1e3, 1e4}) {
        const double v = mass_spectrum_closed_form(MirrorModel(omega_c), 1.0);
        EXPECT_LT(v, previous);
        previous = v;
    }
}

TEST(LowFreqAsymptote, Examples)
{
    const MirrorModel m(1.0);
    EXPECT_NEAR(low_freq_asymptote(m, SpectrumComponent::F1F1, 0.1), 1e-3 / (3.0 * pi), 1e-18);
    EXPECT_NEAR(low_freq_asymptote(m, SpectrumComponent::F0F0, 0.1), 1e-5 / (6.0 * pi), 1e-20);
    EXPECT_NEAR(low_freq_asymptote(m, SpectrumComponent::Mass, 0.1), 1e-3 / (6.0 * pi), 1e-18);
    for (auto c : {SpectrumComponent::F0F0, SpectrumComponent::F1F1, SpectrumComponent::Mass})
        EXPECT_EQ(low_freq_asymptote(m, c, -0.1), 0.0);
    EXPECT_THROW(low_freq_asymptote(m, SpectrumComponent::F0F1, 0.1), ValidationError);
}

TEST(FieldAutocorrelation, Examples)
{
    const MirrorModel m(1.0);
    EXPECT_DOUBLE_EQ(field_autocorrelation(m, 1.0), 0.5);
    EXPECT_EQ(field_autocorrelation(m, -1.0), 0.0);
    EXPECT_LT(field_autocorrelation(m, 1e8), 1e-7);
    EXPECT_LT(field_autocorrelation(m, 1e-8), 1e-7);
}

TEST(MeanInducedMass, Examples)
{
    const MirrorModel m(1.0);
    EXPECT_NEAR(mean_induced_mass(m, 1.0), std::log(2.0) / (4.0 * pi), 1e-16);
    EXPECT_NEAR(mean_induced_mass(m, 1.0), 0.0551589000381629, 1e-15);
    EXPECT_NEAR(mean_induced_mass(m, 1.0, SpectrumMethod::Quadrature), 0.0551589000381629, 1e-14);
    EXPECT_LT(mean_induced_mass(m, 1e-10), 1e-20);
    EXPECT_THROW(mean_induced_mass(m, 0.0), ValidationError);
    EXPECT_EQ(mean_induced_mass(MirrorModel::perfect_reflector(), 10.0), 0.0);
}

TEST(MeanInducedMass, QuadratureMatchesLogarithm)
{
    for (double omega_c : {0.3, 1.0, 5.0})
        for (double ratio : {1.0, 10.0, 1e3}) {
            const MirrorModel m(omega_c);
            const double lambda = ratio * omega_c;
            EXPECT_NEAR(mean_induced_mass_quadrature(m, lambda).value / mean_induced_mass_analytic(m, lambda), 1.0,
                        1e-8);
        }
}

TEST(VarianceRelation, TwiceMeanSquared)
{
    for (double lambda : {1.0, 10.0}) {
        const auto v = variance_relation_check(MirrorModel(1.0), lambda);
        EXPECT_NEAR(v.variance / v.twice_mean_sq, 1.0, 1e-6) << lambda;
    }
}

TEST(MethodSupport, Pairings)
{
    EXPECT_TRUE(method_supported(SpectrumComponent::F0F1, SpectrumMethod::Quadrature));
    EXPECT_TRUE(method_supported(SpectrumComponent::Mass, SpectrumMethod::Convolution));
    EXPECT_FALSE(method_supported(SpectrumComponent::F0F0, SpectrumMethod::ClosedForm));
    EXPECT_FALSE(method_supported(SpectrumComponent::F0F1, SpectrumMethod::Asymptote));
    EXPECT_THROW(evaluate_spectrum(MirrorModel(1.0), SpectrumComponent::F1F1, SpectrumMethod::Convolution, 1.0),
                 ValidationError);
}

TEST(EvaluateOnGrid, IndependentOfThreadCount)
{
    const auto grid = log_grid(1e-2, 1e2, 40);
    const auto one = evaluate_on_grid(MirrorModel(1.0), SpectrumComponent::F1F1, SpectrumMethod::Quadrature, grid, {}, 1);
    const auto many = evaluate_on_grid(MirrorModel(1.0), SpectrumComponent::F1F1, SpectrumMethod::Quadrature, grid, {}, 7);
    EXPECT_EQ(one.values, many.values);
    EXPECT_EQ(one.error_estimates, many.error_estimates);
    EXPECT_EQ(one.frequencies, grid);
}
