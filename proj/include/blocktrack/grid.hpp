#pragma once

#include "calendar.hpp"
#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace blocktrack {

using WarningSink = std::function<void(const std::string&)>;

/// Cell-centered latitude/longitude grid. Rows follow latitude, columns longitude.
class LatLonGrid {
public:
    LatLonGrid() = default;

    LatLonGrid(std::vector<double> lat_centers, std::vector<double> lon_centers)
        : lat_(std::move(lat_centers)), lon_(std::move(lon_centers))
    {
        if (lat_.empty() || lon_.empty()) {
            throw InvalidArgument("grid needs at least one row and one column");
        }
        if (!strictly_monotone(lat_) || !strictly_monotone(lon_)) {
            throw InvalidArgument("grid coordinates must be strictly monotone");
        }
        for (double v : lat_) {
            if (!(std::abs(v) <= 90.0)) {
                throw InvalidArgument("latitude outside [-90, 90]");
            }
        }
        for (double v : lon_) {
            if (!std::isfinite(v)) {
                throw InvalidArgument("non-finite longitude");
            }
        }
    }

    /// Regular grid spanning [first, last] inclusive in both axes.
    static LatLonGrid regular(double lat_first, double lat_last, std::size_t n_lat, double lon_first, double lon_last,
                              std::size_t n_lon)
    {
        return LatLonGrid(linspace(lat_first, lat_last, n_lat), linspace(lon_first, lon_last, n_lon));
    }

    std::size_t n_lat() const { return lat_.size(); }
    std::size_t n_lon() const { return lon_.size(); }
    std::size_t n_cells() const { return lat_.size() * lon_.size(); }
    double lat(std::size_t row) const { return lat_[row]; }
    double lon(std::size_t col) const { return lon_[col]; }
    const std::vector<double>& lat_centers() const { return lat_; }
    const std::vector<double>& lon_centers() const { return lon_; }

    /// Cell-corner coordinates: midpoints between centers, extrapolated by half
    /// a spacing at either end. Sizes n_lat + 1 and n_lon + 1. A single-center
    /// axis is given a nominal 1 degree width.
    std::vector<double> lat_edges() const { return edges_of(lat_); }
    std::vector<double> lon_edges() const { return edges_of(lon_); }

    bool operator==(const LatLonGrid&) const = default;

private:
    static bool strictly_monotone(const std::vector<double>& v)
    {
        bool inc = true;
        bool dec = true;
        for (std::size_t i = 1; i < v.size(); ++i) {
            inc = inc && v[i] > v[i - 1];
            dec = dec && v[i] < v[i - 1];
        }
        return inc || dec;
    }

    static std::vector<double> linspace(double first, double last, std::size_t n)
    {
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = n == 1 ? first : first + (last - first) * static_cast<double>(i) / static_cast<double>(n - 1);
        }
        return out;
    }

    static std::vector<double> edges_of(const std::vector<double>& c)
    {
        std::vector<double> e(c.size() + 1);
        for (std::size_t i = 1; i < c.size(); ++i) {
            e[i] = 0.5 * (c[i - 1] + c[i]);
        }
        const double first_step = c.size() > 1 ? c[1] - c[0] : 1.0;
        const double last_step = c.size() > 1 ? c[c.size() - 1] - c[c.size() - 2] : 1.0;
        e.front() = c.front() - 0.5 * first_step;
        e.back() = c.back() + 0.5 * last_step;
        return e;
    }

    std::vector<double> lat_;
    std::vector<double> lon_;
};

/// Time-ordered stack of daily 2D fields, stored row-major as [date][lat][lon].
class DailyFieldSeries {
public:
    DailyFieldSeries() = default;

    DailyFieldSeries(LatLonGrid grid, CalendarKind calendar, std::vector<Date> dates, std::vector<double> values)
        : grid_(std::move(grid)), calendar_(calendar), dates_(std::move(dates)), values_(std::move(values))
    {
        if (values_.size() != dates_.size() * grid_.n_cells()) {
            throw ShapeError("series payload has " + std::to_string(values_.size()) + " values, expected " +
                             std::to_string(dates_.size() * grid_.n_cells()));
        }
        for (std::size_t t = 0; t < dates_.size(); ++t) {
            if (!is_valid_date(calendar_, dates_[t])) {
                throw InvalidArgument("date " + format_date(dates_[t]) + " does not exist in calendar " +
                                      std::string(calendar_name(calendar_)));
            }
            if (t > 0 && !(dates_[t - 1] < dates_[t])) {
                throw InvalidArgument("series dates must be strictly increasing");
            }
        }
    }

    const LatLonGrid& grid() const { return grid_; }
    CalendarKind calendar() const { return calendar_; }
    const std::vector<Date>& dates() const { return dates_; }
    std::size_t n_dates() const { return dates_.size(); }
    const std::vector<double>& values() const { return values_; }

    std::span<const double> slice(std::size_t t) const
    {
        return {values_.data() + t * grid_.n_cells(), grid_.n_cells()};
    }
    std::span<double> slice(std::size_t t) { return {values_.data() + t * grid_.n_cells(), grid_.n_cells()}; }

    double at(std::size_t t, std::size_t row, std::size_t col) const
    {
        return values_[(t * grid_.n_lat() + row) * grid_.n_lon() + col];
    }

    /// Series restricted to the dates for which keep(date) holds.
    template <class Pred>
    DailyFieldSeries filter_dates(Pred&& keep) const
    {
        std::vector<Date> dates;
        std::vector<double> values;
        for (std::size_t t = 0; t < dates_.size(); ++t) {
            if (keep(dates_[t])) {
                dates.push_back(dates_[t]);
                auto s = slice(t);
                values.insert(values.end(), s.begin(), s.end());
            }
        }
        return DailyFieldSeries(grid_, calendar_, std::move(dates), std::move(values));
    }

    /// Same grid, calendar and dates with a new payload.
    DailyFieldSeries with_values(std::vector<double> values) const
    {
        return DailyFieldSeries(grid_, calendar_, dates_, std::move(values));
    }

private:
    LatLonGrid grid_;
    CalendarKind calendar_ = CalendarKind::gregorian365;
    std::vector<Date> dates_;
    std::vector<double> values_;
};

/// cos(lat) for a latitude in degrees.
inline double latitude_weight(double lat_deg)
{
    if (!(std::abs(lat_deg) <= 90.0)) {
        throw InvalidArgument("latitude outside [-90, 90]");
    }
    if (std::abs(lat_deg) == 90.0) {
        return 0.0;
    }
    return std::cos(lat_deg * std::numbers::pi / 180.0);
}

/// latitude_weight for every row of a grid.
inline std::vector<double> row_weights(const LatLonGrid& grid)
{
    std::vector<double> w(grid.n_lat());
    for (std::size_t r = 0; r < grid.n_lat(); ++r) {
        w[r] = latitude_weight(grid.lat(r));
    }
    return w;
}

/// Mean over non-overlapping factor_lat x factor_lon blocks aligned to the grid
/// origin. Trailing rows/columns that do not fill a block are dropped.
inline DailyFieldSeries block_average(const DailyFieldSeries& series, std::size_t factor_lat, std::size_t factor_lon,
                                      const WarningSink& warn = {})
{
    if (factor_lat == 0 || factor_lon == 0) {
        throw InvalidArgument("block_average factors must be positive");
    }
    const auto& g = series.grid();
    const std::size_t out_lat = g.n_lat() / factor_lat;
    const std::size_t out_lon = g.n_lon() / factor_lon;
    if (out_lat == 0 || out_lon == 0) {
        throw InvalidArgument("block_average factor exceeds the grid size");
    }
    if (warn && (g.n_lat() % factor_lat != 0 || g.n_lon() % factor_lon != 0)) {
        warn("block_average: dropping " + std::to_string(g.n_lat() % factor_lat) + " trailing rows and " +
             std::to_string(g.n_lon() % factor_lon) + " trailing columns");
    }

    auto block_centers = [](const std::vector<double>& c, std::size_t factor, std::size_t n_out) {
        std::vector<double> out(n_out);
        for (std::size_t b = 0; b < n_out; ++b) {
            double sum = 0.0;
            for (std::size_t k = 0; k < factor; ++k) {
                sum += c[b * factor + k];
            }
            out[b] = sum / static_cast<double>(factor);
        }
        return out;
    };
    LatLonGrid out_grid(block_centers(g.lat_centers(), factor_lat, out_lat),
                        block_centers(g.lon_centers(), factor_lon, out_lon));

    const double inv = 1.0 / static_cast<double>(factor_lat * factor_lon);
    std::vector<double> values(series.n_dates() * out_lat * out_lon);
    for (std::size_t t = 0; t < series.n_dates(); ++t) {
        auto in = series.slice(t);
        double* out = values.data() + t * out_lat * out_lon;
        for (std::size_t br = 0; br < out_lat; ++br) {
            for (std::size_t bc = 0; bc < out_lon; ++bc) {
                double sum = 0.0;
                for (std::size_t i = 0; i < factor_lat; ++i) {
                    const std::size_t row = br * factor_lat + i;
                    for (std::size_t j = 0; j < factor_lon; ++j) {
                        sum += in[row * g.n_lon() + bc * factor_lon + j];
                    }
                }
                out[br * out_lon + bc] = sum * inv;
            }
        }
    }
    return DailyFieldSeries(std::move(out_grid), series.calendar(), series.dates(), std::move(values));
}

/// Keeps the cells whose centers fall inside the closed window. Longitudes are
/// matched modulo 360 so a 0..360 global grid can be cut to a window such as
/// [-10, 40]; output longitudes are expressed in the window's frame.
inline DailyFieldSeries crop_domain(const DailyFieldSeries& series, double lat_min, double lat_max, double lon_min,
                                    double lon_max)
{
    if (lat_min > lat_max || lon_min > lon_max) {
        throw InvalidArgument("crop window bounds are reversed");
    }
    const auto& g = series.grid();

    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < g.n_lat(); ++r) {
        if (g.lat(r) >= lat_min && g.lat(r) <= lat_max) {
            rows.push_back(r);
        }
    }

    std::vector<std::pair<double, std::size_t>> cols;
    for (std::size_t c = 0; c < g.n_lon(); ++c) {
        double lon = g.lon(c);
        if (lon > lon_max || lon < lon_min) {
            // Shift into [lon_min, lon_min + 360).
            lon = lon_min + std::fmod(std::fmod(lon - lon_min, 360.0) + 360.0, 360.0);
        }
        if (lon >= lon_min && lon <= lon_max) {
            cols.emplace_back(lon, c);
        }
    }
    const bool inc = std::is_sorted(cols.begin(), cols.end(), [](auto& a, auto& b) { return a.first < b.first; });
    const bool dec = std::is_sorted(cols.begin(), cols.end(), [](auto& a, auto& b) { return a.first > b.first; });
    if (!inc && !dec) {
        std::stable_sort(cols.begin(), cols.end(), [](auto& a, auto& b) { return a.first < b.first; });
    }

    if (rows.empty() || cols.empty()) {
        throw EmptyDomain("crop window does not intersect the grid");
    }

    std::vector<double> lat;
    for (auto r : rows) {
        lat.push_back(g.lat(r));
    }
    std::vector<double> lon;
    for (auto& [v, c] : cols) {
        lon.push_back(v);
    }
    LatLonGrid out_grid(std::move(lat), std::move(lon));

    std::vector<double> values(series.n_dates() * out_grid.n_cells());
    for (std::size_t t = 0; t < series.n_dates(); ++t) {
        double* out = values.data() + t * out_grid.n_cells();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            for (std::size_t j = 0; j < cols.size(); ++j) {
                out[i * cols.size() + j] = series.at(t, rows[i], cols[j].second);
            }
        }
    }
    return DailyFieldSeries(std::move(out_grid), series.calendar(), series.dates(), std::move(values));
}

} // namespace blocktrack
