#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "vacmass/mirror_model.hpp"

namespace vacmass {

enum class GridSpacing { Log, Linear };

struct GridSpec {
    double min = 1e-3;
    double max = 1e3;
    std::size_t points = 400;
    GridSpacing spacing = GridSpacing::Log;
};

namespace detail {

inline std::vector<std::string_view> split(std::string_view text, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = text.find(sep, start);
        out.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) return out;
        start = pos + 1;
    }
}

inline double parse_double(std::string_view field, std::string_view what)
{
    double value = 0.0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (field.empty() || ec != std::errc() || ptr != end || !std::isfinite(value))
        throw ValidationError("invalid " + std::string(what) + " '" + std::string(field) + "'");
    return value;
}

}  // namespace detail

inline void validate(const GridSpec& g)
{
    if (g.points < 1) throw ValidationError("grid needs at least one point");
    if (g.points == 1) {
        if (g.min != g.max) throw ValidationError("a one-point grid needs min == max");
        return;
    }
    if (!(g.max > g.min)) throw ValidationError("grid needs max > min");
    if (g.spacing == GridSpacing::Log && !(g.min > 0.0))
        throw ValidationError("log grid endpoints must be positive");
}

/// Parses `min:max:points[:log|lin]` (log by default).
inline GridSpec parse_grid(std::string_view text)
{
    const auto fields = detail::split(text, ':');
    if (fields.size() != 3 && fields.size() != 4)
        throw ValidationError("grid must look like min:max:points[:log|lin], got '" + std::string(text) + "'");

    GridSpec g;
    g.min = detail::parse_double(fields[0], "grid minimum");
    g.max = detail::parse_double(fields[1], "grid maximum");
    std::size_t points = 0;
    const auto* end = fields[2].data() + fields[2].size();
    const auto [ptr, ec] = std::from_chars(fields[2].data(), end, points);
    if (fields[2].empty() || ec != std::errc() || ptr != end)
        throw ValidationError("invalid grid point count '" + std::string(fields[2]) + "'");
    g.points = points;
    if (fields.size() == 4) {
        if (fields[3] == "log")
            g.spacing = GridSpacing::Log;
        else if (fields[3] == "lin")
            g.spacing = GridSpacing::Linear;
        else
            throw ValidationError("grid spacing must be log or lin, got '" + std::string(fields[3]) + "'");
    }
    validate(g);
    return g;
}

/// Grid nodes; the endpoints are reproduced exactly.
inline std::vector<double> make_grid(const GridSpec& g)
{
    validate(g);
    std::vector<double> out(g.points);
    if (g.points == 1) {
        out[0] = g.min;
        return out;
    }
    const double last = static_cast<double>(g.points - 1);
    if (g.spacing == GridSpacing::Log) {
        const double lo = std::log(g.min);
        const double hi = std::log(g.max);
        for (std::size_t i = 0; i < g.points; ++i) out[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / last);
    } else {
        for (std::size_t i = 0; i < g.points; ++i) out[i] = g.min + (g.max - g.min) * static_cast<double>(i) / last;
    }
    out.front() = g.min;
    out.back() = g.max;
    return out;
}

/// Log grid over [lo, hi] with n points.
inline std::vector<double> log_grid(double lo, double hi, std::size_t n)
{
    return make_grid({lo, hi, n, GridSpacing::Log});
}

}  // namespace vacmass
