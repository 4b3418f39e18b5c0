#pragma once

#include "calendar.hpp"
#include "cell_mask.hpp"
#include "error.hpp"
#include "grid.hpp"
#include "labels.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cstdint>
#include <span>
#include <tuple>
#include <vector>

namespace blocktrack {

enum class Connectivity { four = 4, eight = 8 };

/// Position of a component: index of its day in the analysis window, then its
/// raster-scan order within that day.
struct ComponentId {
    std::size_t day = 0;
    std::size_t index = 0;

    auto operator<=>(const ComponentId&) const = default;
};

/// One contiguous region of a day's superlevel set.
struct Component {
    ComponentId id;
    Date date;
    std::size_t n_lat = 0;
    std::size_t n_lon = 0;
    std::vector<std::uint32_t> cells;          // sorted flat indices
    std::vector<std::uint32_t> boundary_cells; // sorted, subset of cells
    double weighted_area = 0.0;

    CellMask mask() const { return CellMask::from_cells(n_lat * n_lon, cells); }
};

/// Connected regions of the set cells of a binary raster. Regions are returned
/// in raster order of their first cell; each cell list is sorted.
inline std::vector<std::vector<std::uint32_t>> connected_regions(std::span<const std::uint8_t> mask, std::size_t n_lat,
                                                                 std::size_t n_lon,
                                                                 Connectivity connectivity = Connectivity::four)
{
    if (mask.size() != n_lat * n_lon) {
        throw ShapeError("mask size does not match raster dimensions");
    }
    std::vector<std::uint8_t> seen(mask.size(), 0);
    std::vector<std::vector<std::uint32_t>> regions;
    std::vector<std::uint32_t> stack;

    for (std::size_t start = 0; start < mask.size(); ++start) {
        if (!mask[start] || seen[start]) {
            continue;
        }
        std::vector<std::uint32_t> region;
        seen[start] = 1;
        stack.push_back(static_cast<std::uint32_t>(start));
        while (!stack.empty()) {
            const std::uint32_t cell = stack.back();
            stack.pop_back();
            region.push_back(cell);
            const auto r = static_cast<long>(cell / n_lon);
            const auto c = static_cast<long>(cell % n_lon);
            for (long dr = -1; dr <= 1; ++dr) {
                for (long dc = -1; dc <= 1; ++dc) {
                    if ((dr == 0 && dc == 0) || (connectivity == Connectivity::four && dr != 0 && dc != 0)) {
                        continue;
                    }
                    const long nr = r + dr;
                    const long nc = c + dc;
                    if (nr < 0 || nc < 0 || nr >= static_cast<long>(n_lat) || nc >= static_cast<long>(n_lon)) {
                        continue;
                    }
                    const auto next = static_cast<std::size_t>(nr) * n_lon + static_cast<std::size_t>(nc);
                    if (mask[next] && !seen[next]) {
                        seen[next] = 1;
                        stack.push_back(static_cast<std::uint32_t>(next));
                    }
                }
            }
        }
        std::sort(region.begin(), region.end());
        regions.push_back(std::move(region));
    }
    return regions;
}

/// Components of a binary raster with boundary cells and cos(lat)-weighted area.
inline std::vector<Component> components_from_mask(std::span<const std::uint8_t> mask, const LatLonGrid& grid,
                                                   std::span<const double> weights, Connectivity connectivity,
                                                   Date date = {}, std::size_t day = 0)
{
    const std::size_t n_lat = grid.n_lat();
    const std::size_t n_lon = grid.n_lon();
    auto regions = connected_regions(mask, n_lat, n_lon, connectivity);

    std::vector<Component> out;
    out.reserve(regions.size());
    for (std::size_t i = 0; i < regions.size(); ++i) {
        Component comp;
        comp.id = {day, i};
        comp.date = date;
        comp.n_lat = n_lat;
        comp.n_lon = n_lon;
        comp.cells = std::move(regions[i]);
        for (auto cell : comp.cells) {
            const std::size_t r = cell / n_lon;
            const std::size_t c = cell % n_lon;
            comp.weighted_area += weights[r];
            const bool edge = r == 0 || c == 0 || r + 1 == n_lat || c + 1 == n_lon;
            if (edge || !mask[cell - n_lon] || !mask[cell + n_lon] || !mask[cell - 1] || !mask[cell + 1]) {
                comp.boundary_cells.push_back(cell);
            }
        }
        out.push_back(std::move(comp));
    }
    return out;
}

/// 4- (or 8-) connected components of {x : field(x) >= lambda}.
inline std::vector<Component> extract_components(std::span<const double> field, const LatLonGrid& grid, double lambda,
                                                 Connectivity connectivity = Connectivity::four, Date date = {},
                                                 std::size_t day = 0)
{
    if (field.size() != grid.n_cells()) {
        throw ShapeError("field size does not match grid");
    }
    std::vector<std::uint8_t> mask(field.size());
    for (std::size_t i = 0; i < field.size(); ++i) {
        mask[i] = field[i] >= lambda ? 1 : 0;
    }
    const auto weights = row_weights(grid);
    return components_from_mask(mask, grid, weights, connectivity, date, day);
}

namespace detail {

inline void require_on_grid(const Component& a, const LatLonGrid& grid)
{
    if (a.n_lat != grid.n_lat() || a.n_lon != grid.n_lon()) {
        throw ShapeError("component does not live on the given grid");
    }
}

} // namespace detail

/// Sum of cos(lat) over the cells shared by two components.
inline double weighted_overlap(const Component& a, const Component& b, const LatLonGrid& grid)
{
    detail::require_on_grid(a, grid);
    detail::require_on_grid(b, grid);
    double sum = 0.0;
    auto ia = a.cells.begin();
    auto ib = b.cells.begin();
    while (ia != a.cells.end() && ib != b.cells.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            sum += latitude_weight(grid.lat(*ia / grid.n_lon()));
            ++ia;
            ++ib;
        }
    }
    return sum;
}

inline std::size_t shared_cell_count(const Component& a, const Component& b)
{
    if (a.n_lat != b.n_lat || a.n_lon != b.n_lon) {
        throw ShapeError("components live on different grids");
    }
    std::size_t n = 0;
    auto ia = a.cells.begin();
    auto ib = b.cells.begin();
    while (ia != a.cells.end() && ib != b.cells.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++n;
            ++ia;
            ++ib;
        }
    }
    return n;
}

/// Components of one day of the analysis window.
struct DayComponents {
    Date date;
    std::vector<Component> components;
};

enum class OverlapMeasure { latitude_weighted, cell_count };

struct TrajectoryEdge {
    std::size_t from = 0; // node index
    std::size_t to = 0;
    double weighted_overlap = 0.0;
    std::size_t shared_cells = 0;

    bool operator==(const TrajectoryEdge&) const = default;
};

/// Day-to-day correspondence DAG. Nodes are ordered by ComponentId, edges by
/// (from, to); every edge joins consecutive calendar days.
struct TrajectoryGraph {
    std::vector<Date> dates;
    std::vector<std::size_t> day_offsets; // nodes of day d: [day_offsets[d], day_offsets[d + 1])
    std::vector<Component> nodes;
    std::vector<TrajectoryEdge> edges;
    OverlapMeasure measure = OverlapMeasure::latitude_weighted;
    double threshold = 0.0;

    std::size_t node_index(ComponentId id) const { return day_offsets[id.day] + id.index; }
};

/// Every pair of components on consecutive calendar days that shares at least
/// one cell, with both overlap measures. Depends on the components only, so it
/// can be filtered for any threshold afterwards.
inline std::vector<TrajectoryEdge> candidate_links(const std::vector<DayComponents>& days, CalendarKind calendar,
                                                   const LatLonGrid& grid, Parallelism par = {})
{
    const auto weights = row_weights(grid);
    std::vector<std::size_t> offsets(days.size() + 1, 0);
    for (std::size_t d = 0; d < days.size(); ++d) {
        offsets[d + 1] = offsets[d] + days[d].components.size();
    }

    std::vector<std::vector<TrajectoryEdge>> per_pair(days.size() > 0 ? days.size() - 1 : 0);
    parallel_for(per_pair.size(), par, [&](std::size_t d) {
        const auto& today = days[d];
        const auto& tomorrow = days[d + 1];
        if (next_day(calendar, today.date) != tomorrow.date || today.components.empty() ||
            tomorrow.components.empty()) {
            return;
        }
        std::vector<std::int32_t> label(grid.n_cells(), -1);
        for (std::size_t b = 0; b < tomorrow.components.size(); ++b) {
            detail::require_on_grid(tomorrow.components[b], grid);
            for (auto cell : tomorrow.components[b].cells) {
                label[cell] = static_cast<std::int32_t>(b);
            }
        }
        std::vector<double> sums(tomorrow.components.size());
        std::vector<std::size_t> counts(tomorrow.components.size());
        for (std::size_t a = 0; a < today.components.size(); ++a) {
            detail::require_on_grid(today.components[a], grid);
            std::fill(sums.begin(), sums.end(), 0.0);
            std::fill(counts.begin(), counts.end(), 0);
            // Ascending cell order matches weighted_overlap's summation order.
            for (auto cell : today.components[a].cells) {
                const auto b = label[cell];
                if (b >= 0) {
                    sums[static_cast<std::size_t>(b)] += weights[cell / grid.n_lon()];
                    ++counts[static_cast<std::size_t>(b)];
                }
            }
            for (std::size_t b = 0; b < counts.size(); ++b) {
                if (counts[b] > 0) {
                    per_pair[d].push_back({offsets[d] + a, offsets[d + 1] + b, sums[b], counts[b]});
                }
            }
        }
    });

    std::vector<TrajectoryEdge> edges;
    for (auto& v : per_pair) {
        edges.insert(edges.end(), v.begin(), v.end());
    }
    return edges;
}

/// Graph over the given days keeping the candidate links whose overlap under
/// `measure` is >= threshold.
inline TrajectoryGraph assemble_graph(const std::vector<DayComponents>& days,
                                      const std::vector<TrajectoryEdge>& candidates, OverlapMeasure measure,
                                      double threshold)
{
    TrajectoryGraph g;
    g.measure = measure;
    g.threshold = threshold;
    g.day_offsets.assign(days.size() + 1, 0);
    for (std::size_t d = 0; d < days.size(); ++d) {
        g.dates.push_back(days[d].date);
        g.day_offsets[d + 1] = g.day_offsets[d] + days[d].components.size();
        for (const auto& comp : days[d].components) {
            g.nodes.push_back(comp);
            g.nodes.back().id = {d, g.nodes.size() - 1 - g.day_offsets[d]};
        }
    }
    for (const auto& e : candidates) {
        if (e.from >= g.nodes.size() || e.to >= g.nodes.size() ||
            g.nodes[e.to].id.day != g.nodes[e.from].id.day + 1) {
            throw InvalidArgument("trajectory edges must join nodes on consecutive days");
        }
        const double value =
            measure == OverlapMeasure::latitude_weighted ? e.weighted_overlap : static_cast<double>(e.shared_cells);
        if (value >= threshold) {
            g.edges.push_back(e);
        }
    }
    std::sort(g.edges.begin(), g.edges.end(),
              [](const auto& a, const auto& b) { return std::tie(a.from, a.to) < std::tie(b.from, b.to); });
    return g;
}

/// Links components on consecutive days whose latitude-weighted overlap is >= C.
/// All qualifying links are kept, so nodes may merge or split.
inline TrajectoryGraph build_trajectory_graph(const std::vector<DayComponents>& days, CalendarKind calendar,
                                              const LatLonGrid& grid, double min_overlap, Parallelism par = {})
{
    return assemble_graph(days, candidate_links(days, calendar, grid, par), OverlapMeasure::latitude_weighted,
                          min_overlap);
}

namespace detail {

/// Longest-chain DP over edges sorted by (from, to) whose endpoints lie on
/// consecutive days, keeping only edges accepted by `keep`.
template <class Keep>
std::vector<std::size_t> longest_chains(std::size_t n_nodes, const std::vector<TrajectoryEdge>& edges, Keep&& keep)
{
    std::vector<std::size_t> before(n_nodes, 0);
    std::vector<std::size_t> after(n_nodes, 0);
    // Nodes are ordered by day and edges by source node, so the edge list is
    // already in topological order.
    for (const auto& e : edges) {
        if (keep(e)) {
            before[e.to] = std::max(before[e.to], before[e.from] + 1);
        }
    }
    for (auto it = edges.rbegin(); it != edges.rend(); ++it) {
        if (keep(*it)) {
            after[it->from] = std::max(after[it->from], after[it->to] + 1);
        }
    }
    std::vector<std::size_t> out(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        out[i] = before[i] + 1 + after[i];
    }
    return out;
}

} // namespace detail

/// Number of days on the longest trajectory through each node: longest
/// ancestor chain + 1 + longest descendant chain.
inline std::vector<std::size_t> chain_lengths(const TrajectoryGraph& graph)
{
    return detail::longest_chains(graph.nodes.size(), graph.edges, [](const TrajectoryEdge&) { return true; });
}

/// Per-date blocked flags and the positive components (footprints) behind them.
struct BlockingLabels {
    std::vector<Date> dates;
    std::vector<std::uint8_t> blocked;
    std::vector<std::vector<ComponentId>> footprints;

    LabelSeries series() const
    {
        LabelSeries s;
        s.dates = dates;
        s.labels = blocked;
        return s;
    }

    std::size_t blocked_days() const
    {
        return static_cast<std::size_t>(std::count(blocked.begin(), blocked.end(), std::uint8_t{1}));
    }
};

/// A component is positive when some trajectory through it spans at least
/// min_days consecutive days; a date is blocked when it has a positive component.
inline BlockingLabels label_blocking(const TrajectoryGraph& graph, std::size_t min_days = 5)
{
    if (min_days == 0) {
        throw InvalidArgument("min_days must be positive");
    }
    const auto chains = chain_lengths(graph);
    BlockingLabels labels;
    labels.dates = graph.dates;
    labels.blocked.assign(graph.dates.size(), 0);
    labels.footprints.resize(graph.dates.size());
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        if (chains[i] >= min_days) {
            const auto id = graph.nodes[i].id;
            labels.blocked[id.day] = 1;
            labels.footprints[id.day].push_back(id);
        }
    }
    return labels;
}

struct DetectionParams {
    double lambda = 1.2;
    double min_overlap = 31.0;
    std::size_t min_days = 5;
    Connectivity connectivity = Connectivity::four;
};

struct DetectionResult {
    BlockingLabels labels;
    TrajectoryGraph graph;
};

/// Superlevel-set components of every day of a series, extracted in parallel.
inline std::vector<DayComponents> extract_all_components(const DailyFieldSeries& series, double lambda,
                                                         Connectivity connectivity, Parallelism par = {})
{
    std::vector<DayComponents> days(series.n_dates());
    const auto weights = row_weights(series.grid());
    parallel_for(series.n_dates(), par, [&](std::size_t t) {
        auto field = series.slice(t);
        std::vector<std::uint8_t> mask(field.size());
        for (std::size_t i = 0; i < field.size(); ++i) {
            mask[i] = field[i] >= lambda ? 1 : 0;
        }
        days[t].date = series.dates()[t];
        days[t].components =
            components_from_mask(mask, series.grid(), weights, connectivity, series.dates()[t], t);
    });
    return days;
}

/// Full detector on a normalized anomaly series: components, overlap links,
/// persistence labels.
inline DetectionResult detect(const DailyFieldSeries& normalized, const DetectionParams& params = {},
                              Parallelism par = {})
{
    auto days = extract_all_components(normalized, params.lambda, params.connectivity, par);
    DetectionResult result;
    result.graph = build_trajectory_graph(days, normalized.calendar(), normalized.grid(), params.min_overlap, par);
    result.labels = label_blocking(result.graph, params.min_days);
    return result;
}

/// A date paired with a cell set on the series grid.
struct DatedMask {
    Date date;
    CellMask mask;
};

/// Union of each blocked date's positive components.
inline std::vector<DatedMask> footprint_masks(const DetectionResult& result)
{
    std::vector<DatedMask> out;
    for (std::size_t d = 0; d < result.labels.dates.size(); ++d) {
        if (!result.labels.blocked[d]) {
            continue;
        }
        DatedMask fm{result.labels.dates[d], {}};
        for (const auto& id : result.labels.footprints[d]) {
            const auto& comp = result.graph.nodes[result.graph.node_index(id)];
            if (fm.mask.size() == 0) {
                fm.mask = CellMask(comp.n_lat * comp.n_lon);
            }
            for (auto cell : comp.cells) {
                fm.mask.set(cell);
            }
        }
        out.push_back(std::move(fm));
    }
    return out;
}

} // namespace blocktrack
