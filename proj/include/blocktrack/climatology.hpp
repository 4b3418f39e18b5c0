#pragma once

#include "calendar.hpp"
#include "error.hpp"
#include "grid.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace blocktrack {

/// Per-cell climatological cycle. Arrays are laid out [day_of_cycle][cell]
/// and are empty when a stage has not been computed.
struct SeasonalCycle {
    LatLonGrid grid;
    CalendarKind calendar = CalendarKind::gregorian365;
    std::size_t length = 365;
    std::size_t n_harmonics = 6;
    std::vector<std::size_t> samples; // per day of cycle
    std::vector<double> raw_mean;
    std::vector<double> smoothed_mean;
    std::vector<double> raw_std;
    std::vector<double> smoothed_std;

    std::size_t index(std::size_t day, std::size_t cell) const { return day * grid.n_cells() + cell; }

    std::span<const double> smoothed_mean_day(std::size_t day) const
    {
        return {smoothed_mean.data() + day * grid.n_cells(), grid.n_cells()};
    }
    std::span<const double> smoothed_std_day(std::size_t day) const
    {
        return {smoothed_std.data() + day * grid.n_cells(), grid.n_cells()};
    }
};

/// Keeps the mean plus harmonics 1..n_harmonics of the discrete Fourier series
/// of a periodic array and zeroes the rest.
inline std::vector<double> fourier_smooth(std::span<const double> values, std::size_t n_harmonics = 6)
{
    const std::size_t len = values.size();
    if (len == 0) {
        throw InvalidArgument("fourier_smooth needs a non-empty array");
    }
    if (2 * n_harmonics >= len) {
        throw InvalidArgument("fourier_smooth: n_harmonics must be below half the cycle length");
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw InvalidArgument("fourier_smooth: non-finite input");
        }
    }

    // Phase table indexed by (k * t) mod len keeps the trig arguments small.
    std::vector<double> cos_table(len);
    std::vector<double> sin_table(len);
    for (std::size_t m = 0; m < len; ++m) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(len);
        cos_table[m] = std::cos(angle);
        sin_table[m] = std::sin(angle);
    }

    double mean = 0.0;
    for (double v : values) {
        mean += v;
    }
    mean /= static_cast<double>(len);

    std::vector<double> out(len, mean);
    for (std::size_t k = 1; k <= n_harmonics; ++k) {
        double a = 0.0;
        double b = 0.0;
        for (std::size_t t = 0; t < len; ++t) {
            const std::size_t m = (k * t) % len;
            a += values[t] * cos_table[m];
            b += values[t] * sin_table[m];
        }
        a *= 2.0 / static_cast<double>(len);
        b *= 2.0 / static_cast<double>(len);
        for (std::size_t t = 0; t < len; ++t) {
            const std::size_t m = (k * t) % len;
            out[t] += a * cos_table[m] + b * sin_table[m];
        }
    }
    return out;
}

namespace detail {

inline constexpr std::size_t cell_block = 256;

inline std::size_t cell_blocks(std::size_t n_cells) { return (n_cells + cell_block - 1) / cell_block; }

inline void require_same_frame(const DailyFieldSeries& series, const SeasonalCycle& cycle)
{
    if (!(series.grid() == cycle.grid)) {
        throw ShapeError("series grid does not match the seasonal cycle grid");
    }
    if (series.calendar() != cycle.calendar) {
        throw ShapeError("series calendar does not match the seasonal cycle calendar");
    }
}

/// Smooths every cell's cycle of a [day][cell] array.
inline std::vector<double> smooth_cycles(const std::vector<double>& raw, std::size_t length, std::size_t n_cells,
                                         std::size_t n_harmonics, Parallelism par)
{
    std::vector<double> out(raw.size());
    parallel_for(n_cells, par, [&](std::size_t c) {
        std::vector<double> cycle(length);
        for (std::size_t d = 0; d < length; ++d) {
            cycle[d] = raw[d * n_cells + c];
        }
        auto smoothed = fourier_smooth(cycle, n_harmonics);
        for (std::size_t d = 0; d < length; ++d) {
            out[d * n_cells + c] = smoothed[d];
        }
    });
    return out;
}

inline SeasonalCycle accumulate_mean(const DailyFieldSeries& series, Parallelism par)
{
    SeasonalCycle cycle;
    cycle.grid = series.grid();
    cycle.calendar = series.calendar();
    cycle.length = static_cast<std::size_t>(cycle_length(series.calendar()));

    const std::size_t n_cells = series.grid().n_cells();
    std::vector<int> day_index(series.n_dates(), -1);
    cycle.samples.assign(cycle.length, 0);
    for (std::size_t t = 0; t < series.n_dates(); ++t) {
        const Date d = series.dates()[t];
        if (series.calendar() == CalendarKind::gregorian365 && is_feb29(d)) {
            continue;
        }
        day_index[t] = day_of_cycle(series.calendar(), d);
        ++cycle.samples[static_cast<std::size_t>(day_index[t])];
    }
    for (std::size_t d = 0; d < cycle.length; ++d) {
        if (cycle.samples[d] < 2) {
            throw InsufficientData("climatology needs at least two years of samples for every calendar day");
        }
    }

    cycle.raw_mean.assign(cycle.length * n_cells, 0.0);
    parallel_for(cell_blocks(n_cells), par, [&](std::size_t block) {
        const std::size_t c0 = block * cell_block;
        const std::size_t c1 = std::min(n_cells, c0 + cell_block);
        for (std::size_t t = 0; t < series.n_dates(); ++t) {
            if (day_index[t] < 0) {
                continue;
            }
            auto in = series.slice(t);
            double* acc = cycle.raw_mean.data() + static_cast<std::size_t>(day_index[t]) * n_cells;
            for (std::size_t c = c0; c < c1; ++c) {
                acc[c] += in[c];
            }
        }
        for (std::size_t d = 0; d < cycle.length; ++d) {
            const double n = static_cast<double>(cycle.samples[d]);
            for (std::size_t c = c0; c < c1; ++c) {
                cycle.raw_mean[d * n_cells + c] /= n;
            }
        }
    });
    return cycle;
}

} // namespace detail

/// Multi-year mean for each calendar day and cell, plus its Fourier-smoothed
/// version. Gregorian Feb 29 values are not accumulated.
inline SeasonalCycle long_term_daily_mean(const DailyFieldSeries& series, std::size_t n_harmonics = 6,
                                          Parallelism par = {})
{
    SeasonalCycle cycle = detail::accumulate_mean(series, par);
    cycle.n_harmonics = n_harmonics;
    cycle.smoothed_mean =
        detail::smooth_cycles(cycle.raw_mean, cycle.length, series.grid().n_cells(), n_harmonics, par);
    return cycle;
}

/// long_term_daily_mean plus the per-day population standard deviation of the
/// raw values across years, smoothed the same way.
inline SeasonalCycle seasonal_cycle(const DailyFieldSeries& series, std::size_t n_harmonics = 6, Parallelism par = {})
{
    SeasonalCycle cycle = long_term_daily_mean(series, n_harmonics, par);
    const std::size_t n_cells = series.grid().n_cells();

    cycle.raw_std.assign(cycle.length * n_cells, 0.0);
    parallel_for(detail::cell_blocks(n_cells), par, [&](std::size_t block) {
        const std::size_t c0 = block * detail::cell_block;
        const std::size_t c1 = std::min(n_cells, c0 + detail::cell_block);
        for (std::size_t t = 0; t < series.n_dates(); ++t) {
            const Date d = series.dates()[t];
            if (series.calendar() == CalendarKind::gregorian365 && is_feb29(d)) {
                continue;
            }
            const auto day = static_cast<std::size_t>(day_of_cycle(series.calendar(), d));
            auto in = series.slice(t);
            const double* mean = cycle.raw_mean.data() + day * n_cells;
            double* acc = cycle.raw_std.data() + day * n_cells;
            for (std::size_t c = c0; c < c1; ++c) {
                const double dev = in[c] - mean[c];
                acc[c] += dev * dev;
            }
        }
        for (std::size_t d = 0; d < cycle.length; ++d) {
            const double n = static_cast<double>(cycle.samples[d]);
            for (std::size_t c = c0; c < c1; ++c) {
                double& v = cycle.raw_std[d * n_cells + c];
                v = std::sqrt(v / n);
            }
        }
    });
    cycle.smoothed_std = detail::smooth_cycles(cycle.raw_std, cycle.length, n_cells, n_harmonics, par);
    return cycle;
}

/// Subtracts the smoothed long-term daily mean; Feb 29 uses Feb 28's value.
inline DailyFieldSeries anomaly(const DailyFieldSeries& series, const SeasonalCycle& cycle, Parallelism par = {})
{
    detail::require_same_frame(series, cycle);
    if (cycle.smoothed_mean.size() != cycle.length * cycle.grid.n_cells()) {
        throw InvalidArgument("seasonal cycle has no smoothed mean");
    }
    std::vector<double> out(series.values().size());
    const std::size_t n_cells = series.grid().n_cells();
    parallel_for(series.n_dates(), par, [&](std::size_t t) {
        const auto day = static_cast<std::size_t>(day_of_cycle(series.calendar(), series.dates()[t]));
        auto in = series.slice(t);
        auto mean = cycle.smoothed_mean_day(day);
        for (std::size_t c = 0; c < n_cells; ++c) {
            out[t * n_cells + c] = in[c] - mean[c];
        }
    });
    return series.with_values(std::move(out));
}

/// Removes each cell's least-squares line (slope and intercept) fitted against
/// the position index of the date in the series.
inline DailyFieldSeries detrend_linear(const DailyFieldSeries& series, Parallelism par = {})
{
    const std::size_t n_t = series.n_dates();
    if (n_t < 2) {
        throw InsufficientData("detrend_linear needs at least two time steps");
    }
    const std::size_t n_cells = series.grid().n_cells();
    const double t_mean = 0.5 * static_cast<double>(n_t - 1);
    double s_tt = 0.0;
    for (std::size_t t = 0; t < n_t; ++t) {
        const double dt = static_cast<double>(t) - t_mean;
        s_tt += dt * dt;
    }

    std::vector<double> out(series.values().size());
    parallel_for(detail::cell_blocks(n_cells), par, [&](std::size_t block) {
        const std::size_t c0 = block * detail::cell_block;
        const std::size_t c1 = std::min(n_cells, c0 + detail::cell_block);
        const std::size_t width = c1 - c0;
        std::vector<double> mean(width, 0.0);
        std::vector<double> s_tv(width, 0.0);
        for (std::size_t t = 0; t < n_t; ++t) {
            auto in = series.slice(t);
            for (std::size_t i = 0; i < width; ++i) {
                mean[i] += in[c0 + i];
            }
        }
        for (auto& m : mean) {
            m /= static_cast<double>(n_t);
        }
        for (std::size_t t = 0; t < n_t; ++t) {
            auto in = series.slice(t);
            const double dt = static_cast<double>(t) - t_mean;
            for (std::size_t i = 0; i < width; ++i) {
                s_tv[i] += dt * (in[c0 + i] - mean[i]);
            }
        }
        for (std::size_t t = 0; t < n_t; ++t) {
            auto in = series.slice(t);
            const double dt = static_cast<double>(t) - t_mean;
            for (std::size_t i = 0; i < width; ++i) {
                const double slope = s_tv[i] / s_tt;
                out[t * n_cells + c0 + i] = in[c0 + i] - mean[i] - slope * dt;
            }
        }
    });
    return series.with_values(std::move(out));
}

/// The value an anomaly is divided by: max(floor, smoothed std).
inline double normalization_divisor(double smoothed_std, double floor = 100.0)
{
    return std::max(floor, smoothed_std);
}

/// Divides anomalies by max(floor, smoothed std) of their cell and calendar day.
inline DailyFieldSeries normalize(const DailyFieldSeries& series, const SeasonalCycle& cycle, double floor = 100.0,
                                  Parallelism par = {})
{
    if (!(floor >= 0.0)) {
        throw InvalidArgument("normalization floor must be non-negative");
    }
    detail::require_same_frame(series, cycle);
    if (cycle.smoothed_std.size() != cycle.length * cycle.grid.n_cells()) {
        throw InvalidArgument("seasonal cycle has no smoothed standard deviation");
    }
    std::vector<double> out(series.values().size());
    const std::size_t n_cells = series.grid().n_cells();
    parallel_for(series.n_dates(), par, [&](std::size_t t) {
        const auto day = static_cast<std::size_t>(day_of_cycle(series.calendar(), series.dates()[t]));
        auto in = series.slice(t);
        auto sd = cycle.smoothed_std_day(day);
        for (std::size_t c = 0; c < n_cells; ++c) {
            out[t * n_cells + c] = in[c] / normalization_divisor(sd[c], floor);
        }
    });
    return series.with_values(std::move(out));
}

struct PreprocessOptions {
    std::size_t n_harmonics = 6;
    double floor = 100.0;
    bool detrend = true;
};

struct PreprocessResult {
    SeasonalCycle cycle;
    DailyFieldSeries anomaly; // meters, detrended when requested
    DailyFieldSeries normalized;
};

/// Raw heights to normalized anomalies: cycle, anomaly, detrend, normalize.
inline PreprocessResult preprocess(const DailyFieldSeries& raw, const PreprocessOptions& options = {},
                                   Parallelism par = {})
{
    PreprocessResult result;
    result.cycle = seasonal_cycle(raw, options.n_harmonics, par);
    result.anomaly = anomaly(raw, result.cycle, par);
    if (options.detrend) {
        result.anomaly = detrend_linear(result.anomaly, par);
    }
    result.normalized = normalize(result.anomaly, result.cycle, options.floor, par);
    return result;
}

} // namespace blocktrack
