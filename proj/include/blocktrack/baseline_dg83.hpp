#pragma once

#include "calendar.hpp"
#include "climatology.hpp"
#include "detection.hpp"
#include "error.hpp"
#include "labels.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace blocktrack {

/// Dole-Gordon index in the Pinheiro et al. variant: a cell is a candidate when
/// its anomaly reaches max(floor, sigma_multiplier * smoothed std); candidate
/// regions sharing min_overlap_cells cells on consecutive days are linked, and
/// trajectories of min_days or more are blocked.
struct DG83Config {
    double sigma_multiplier = 1.5;
    double floor = 100.0; // meters
    std::size_t min_days = 5;
    std::size_t min_overlap_cells = 1;
    /// Scale anomalies by sin(45)/sin(lat) before thresholding, as in the
    /// original 1983 index.
    bool latitude_rescale = false;
    Connectivity connectivity = Connectivity::four;

    void validate() const
    {
        if (!(sigma_multiplier > 0.0) || !(floor > 0.0) || min_days == 0 || min_overlap_cells == 0) {
            throw InvalidArgument("DG83 parameters must all be positive");
        }
    }
};

/// Anomaly threshold in meters for one cell and calendar day.
inline double dg83_threshold(double smoothed_std, const DG83Config& cfg = {})
{
    return std::max(cfg.floor, cfg.sigma_multiplier * smoothed_std);
}

/// Runs the baseline on a (detrended) anomaly series in meters.
inline DetectionResult dg83_detect(const DailyFieldSeries& anomalies, const SeasonalCycle& cycle,
                                   const DG83Config& cfg = {}, Parallelism par = {})
{
    cfg.validate();
    detail::require_same_frame(anomalies, cycle);
    if (cycle.smoothed_std.size() != cycle.length * cycle.grid.n_cells()) {
        throw InvalidArgument("seasonal cycle has no smoothed standard deviation");
    }
    const auto& grid = anomalies.grid();
    const std::size_t n_cells = grid.n_cells();

    std::vector<double> lat_scale(grid.n_lat(), 1.0);
    if (cfg.latitude_rescale) {
        for (std::size_t r = 0; r < grid.n_lat(); ++r) {
            if (!(grid.lat(r) > 0.0)) {
                throw InvalidArgument("latitude rescaling needs northern-hemisphere latitudes");
            }
            lat_scale[r] = std::sin(std::numbers::pi / 4.0) / std::sin(grid.lat(r) * std::numbers::pi / 180.0);
        }
    }

    const auto weights = row_weights(grid);
    std::vector<DayComponents> days(anomalies.n_dates());
    parallel_for(anomalies.n_dates(), par, [&](std::size_t t) {
        const Date date = anomalies.dates()[t];
        const auto day = static_cast<std::size_t>(day_of_cycle(anomalies.calendar(), date));
        auto field = anomalies.slice(t);
        auto sd = cycle.smoothed_std_day(day);
        std::vector<std::uint8_t> mask(n_cells);
        for (std::size_t c = 0; c < n_cells; ++c) {
            mask[c] = field[c] * lat_scale[c / grid.n_lon()] >= dg83_threshold(sd[c], cfg) ? 1 : 0;
        }
        days[t].date = date;
        days[t].components = components_from_mask(mask, grid, weights, cfg.connectivity, date, t);
    });

    DetectionResult result;
    result.graph = assemble_graph(days, candidate_links(days, anomalies.calendar(), grid, par),
                                  OverlapMeasure::cell_count, static_cast<double>(cfg.min_overlap_cells));
    result.labels = label_blocking(result.graph, cfg.min_days);
    return result;
}

/// Table of where two detectors disagree, split by the ground-truth class.
struct DisagreementCounts {
    struct Row {
        std::size_t only_ours_correct = 0;
        std::size_t only_dg83_correct = 0;
        std::size_t both_correct = 0;
        std::size_t both_incorrect = 0;

        std::size_t total() const { return only_ours_correct + only_dg83_correct + both_correct + both_incorrect; }
        bool operator==(const Row&) const = default;
    };

    Row blocked;
    Row not_blocked;
};

/// Counts agreement of two label streams with the truth over the dates of
/// `ours` inside `window`. Both streams must cover the same dates.
inline DisagreementCounts disagreement_table(const LabelSeries& ours, const LabelSeries& dg83, const LabelSeries& truth,
                                             const DateWindow& window = DateWindow::all())
{
    if (ours.dates != dg83.dates) {
        throw AlignmentError("detector label streams cover different dates");
    }
    DisagreementCounts out;
    for (std::size_t i = 0; i < ours.size(); ++i) {
        const Date d = ours.dates[i];
        if (!window.contains(d)) {
            continue;
        }
        const auto gtd = truth.find(d);
        if (!gtd) {
            throw AlignmentError("no ground truth for " + format_date(d));
        }
        const bool ours_ok = (ours.labels[i] != 0) == *gtd;
        const bool dg83_ok = (dg83.labels[i] != 0) == *gtd;
        auto& row = *gtd ? out.blocked : out.not_blocked;
        if (ours_ok && dg83_ok) {
            ++row.both_correct;
        } else if (ours_ok) {
            ++row.only_ours_correct;
        } else if (dg83_ok) {
            ++row.only_dg83_correct;
        } else {
            ++row.both_incorrect;
        }
    }
    return out;
}

} // namespace blocktrack
