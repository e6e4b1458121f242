#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "vacmass/mirror_model.hpp"

namespace vacmass {

struct QuadratureConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    int max_depth = 50;

    void validate() const
    {
        if (!(rel_tol > 0.0)) throw ValidationError("rel_tol must be > 0");
        if (!(abs_tol >= 0.0)) throw ValidationError("abs_tol must be >= 0");
        if (max_depth < 1) throw ValidationError("max_depth must be >= 1");
    }
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long evaluations = 0;
};

/// Tolerance not reached before every unfinished panel hit max_depth.
class NonConvergence : public NumericalError {
public:
    NonConvergence(const std::string& what, QuadratureResult best) : NumericalError(what), best_(best) {}
    const QuadratureResult& best() const noexcept { return best_; }

private:
    QuadratureResult best_;
};

class NonFiniteSample : public NumericalError {
public:
    NonFiniteSample(const std::string& what, double where) : NumericalError(what), where_(where) {}
    double where() const noexcept { return where_; }

private:
    double where_;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (abscissae on [-1, 1]).
inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights on kronrod_nodes[1], [3], [5], [7].
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a;
    double b;
    double value;
    double error;
    int depth;

    bool operator<(const Panel& other) const { return error < other.error; }
};

template <class F>
double sample(const F& f, double x)
{
    const double y = static_cast<double>(f(x));
    if (!std::isfinite(y)) throw NonFiniteSample("integrand is not finite at x = " + std::to_string(x), x);
    return y;
}

template <class F>
Panel gauss_kronrod(const F& f, double a, double b, int depth)
{
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    const double fc = sample(f, centre);
    double kronrod = kronrod_weights[7] * fc;
    double gauss = gauss_weights[3] * fc;
    for (std::size_t i = 0; i < 7; ++i) {
        const double dx = half * kronrod_nodes[i];
        const double pair = sample(f, centre - dx) + sample(f, centre + dx);
        kronrod += kronrod_weights[i] * pair;
        if (i % 2 == 1) gauss += gauss_weights[i / 2] * pair;
    }
    kronrod *= half;
    gauss *= half;
    return {a, b, kronrod, std::abs(kronrod - gauss), depth};
}

}  // namespace detail

/**
 * Globally adaptive Gauss-Kronrod (G7/K15) integration on [a, b].
 *
 * The panel with the largest |K15 - G7| is bisected until the summed
 * estimate satisfies max(abs_tol, rel_tol * |value|). Node placement is
 * deterministic, so results are bit-reproducible.
 *
 * Throws NonConvergence (carrying the best result) when the tolerance cannot
 * be met without exceeding max_depth, and NonFiniteSample when f returns a
 * non-finite value. f must be safe to call concurrently if the caller
 * integrates from several threads.
 */
template <class F>
QuadratureResult integrate(const F& f, double a, double b, const QuadratureConfig& cfg = {})
{
    cfg.validate();
    if (std::isnan(a) || std::isnan(b) || !(a <= b))
        throw ValidationError("integrate requires a <= b");
    if (!std::isfinite(a) || !std::isfinite(b)) throw ValidationError("integration limits must be finite");
    if (a == b) return {};

    constexpr long evaluations_per_panel = 15;
    constexpr std::size_t max_panels = 100000;

    std::vector<detail::Panel> open;
    open.push_back(detail::gauss_kronrod(f, a, b, 0));
    double frozen_value = 0.0;
    double frozen_error = 0.0;
    double total_value = open.front().value;
    double total_error = open.front().error;
    long evaluations = evaluations_per_panel;

    const auto resum = [&] {
        total_value = frozen_value;
        total_error = frozen_error;
        for (const auto& p : open) {
            total_value += p.value;
            total_error += p.error;
        }
    };

    for (std::size_t iteration = 1;; ++iteration) {
        const double tol = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total_value));
        if (total_error <= tol) {
            // Confirm with an exact re-sum before accepting.
            resum();
            if (total_error <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total_value))) break;
        }

        while (!open.empty() && open.front().depth >= cfg.max_depth) {
            std::pop_heap(open.begin(), open.end());
            frozen_value += open.back().value;
            frozen_error += open.back().error;
            open.pop_back();
        }
        if (open.empty() || open.size() >= max_panels) {
            resum();
            throw NonConvergence("quadrature did not reach tolerance on [" + std::to_string(a) + ", " +
                                     std::to_string(b) + "], error estimate " + std::to_string(total_error),
                                 QuadratureResult{total_value, total_error, evaluations});
        }

        std::pop_heap(open.begin(), open.end());
        const detail::Panel worst = open.back();
        open.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        const auto left = detail::gauss_kronrod(f, worst.a, mid, worst.depth + 1);
        const auto right = detail::gauss_kronrod(f, mid, worst.b, worst.depth + 1);
        evaluations += 2 * evaluations_per_panel;
        open.push_back(left);
        std::push_heap(open.begin(), open.end());
        open.push_back(right);
        std::push_heap(open.begin(), open.end());

        total_value += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        if (iteration % 64 == 0) resum();
    }

    return {total_value, total_error, evaluations};
}

/**
 * Integral over [0, lambda_cut]. Divergent integrals are only ever evaluated
 * through this entry point so every call site names its cutoff.
 */
template <class F>
QuadratureResult integrate_to_cutoff(const F& f, double lambda_cut, const QuadratureConfig& cfg = {})
{
    if (std::isnan(lambda_cut) || lambda_cut < 0.0) throw ValidationError("cutoff must be >= 0");
    return integrate(f, 0.0, lambda_cut, cfg);
}

}  // namespace vacmass
