#pragma once

#include "calendar.hpp"
#include "cell_mask.hpp"
#include "contour_trace.hpp"
#include "detection.hpp"
#include "error.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

namespace blocktrack {

enum class EnsembleKind { daily, monthly, seasonal };

/// One contour of an ensemble: an enclosed region and its boundary cells.
struct EnsembleMember {
    std::uint64_t id = 0;
    Date date;
    CellMask region;
    CellMask boundary;
};

/// Members ordered for tie-breaking: earlier date first, then smaller id.
struct MemberKey {
    Date date;
    std::uint64_t id = 0;

    auto operator<=>(const MemberKey&) const = default;
};

struct ContourEnsemble {
    std::size_t n_lat = 0;
    std::size_t n_lon = 0;
    EnsembleKind kind = EnsembleKind::daily;
    std::vector<EnsembleMember> members;

    std::vector<MemberKey> keys() const
    {
        std::vector<MemberKey> k;
        for (const auto& m : members) {
            k.push_back({m.date, m.id});
        }
        return k;
    }

    void validate() const
    {
        if (members.empty()) {
            throw InsufficientEnsemble("ensemble has no members");
        }
        for (const auto& m : members) {
            if (m.region.size() != n_lat * n_lon || m.boundary.size() != n_lat * n_lon) {
                throw ShapeError("ensemble member on a different raster");
            }
            if (!m.boundary.is_subset_of(m.region)) {
                throw InvalidMember("member boundary is not inside its region");
            }
        }
    }
};

/// Member whose boundary is the set of region cells touching the outside.
inline EnsembleMember make_member(std::uint64_t id, Date date, CellMask region, std::size_t n_lat, std::size_t n_lon)
{
    EnsembleMember m{id, date, std::move(region), {}};
    m.boundary = boundary_of(m.region, n_lat, n_lon);
    return m;
}

/// One member per footprint date accepted by `select`, keyed by the date.
inline ContourEnsemble build_ensemble(std::span<const DatedMask> footprints, std::size_t n_lat, std::size_t n_lon,
                                      EnsembleKind kind, const std::function<bool(Date)>& select)
{
    ContourEnsemble ens{n_lat, n_lon, kind, {}};
    for (const auto& fp : footprints) {
        if (select(fp.date) && !fp.mask.none()) {
            ens.members.push_back(make_member(date_key(fp.date), fp.date, fp.mask, n_lat, n_lon));
        }
    }
    return ens;
}

/// Region between two contours: the symmetric difference of their regions.
inline CellMask band(const CellMask& region_j, const CellMask& region_k) { return region_j ^ region_k; }

/// Fraction of a member's boundary cells lying outside a band.
inline double mismatch(const CellMask& boundary, const CellMask& band_jk)
{
    const std::size_t total = boundary.count();
    if (total == 0) {
        throw InvalidMember("member has an empty boundary");
    }
    return static_cast<double>(boundary.count_outside(band_jk)) / static_cast<double>(total);
}

/// How depths are normalized. all_pairs divides by every unordered pair,
/// n(n-1)/2, so a member never counts as inside a pair it belongs to (the 1D
/// band depth of 5 in {2,4,5,7,12} is 4/10). excluding_member divides by the
/// (n-1)(n-2)/2 pairs that do not contain the member.
enum class PairCounting { all_pairs, excluding_member };

/// Mismatch of every member against the band of every unordered pair.
class MismatchMatrix {
public:
    MismatchMatrix() = default;
    explicit MismatchMatrix(std::size_t n) : n_(n), values_(n * pair_count(n), 0.0) {}

    static std::size_t pair_count(std::size_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }

    std::size_t size() const { return n_; }

    /// Index of pair (j, k), j < k, in lexicographic order.
    std::size_t pair_index(std::size_t j, std::size_t k) const
    {
        if (j > k) {
            std::swap(j, k);
        }
        if (j == k || k >= n_) {
            throw InvalidArgument("pair indices must be distinct members");
        }
        return j * (2 * n_ - j - 1) / 2 + (k - j - 1);
    }

    double at(std::size_t i, std::size_t j, std::size_t k) const
    {
        return values_[i * pair_count(n_) + pair_index(j, k)];
    }

    void set(std::size_t i, std::size_t j, std::size_t k, double value)
    {
        if (!(value >= 0.0 && value <= 1.0)) {
            throw InvalidArgument("mismatch values must lie in [0, 1]");
        }
        values_[i * pair_count(n_) + pair_index(j, k)] = value;
    }

private:
    std::size_t n_ = 0;
    std::vector<double> values_;
};

/// Full mismatch matrix, parallel over pairs.
inline MismatchMatrix compute_mismatch_matrix(const ContourEnsemble& ensemble, Parallelism par = {})
{
    ensemble.validate();
    const std::size_t n = ensemble.members.size();
    MismatchMatrix m(n);
    for (const auto& member : ensemble.members) {
        if (member.boundary.none()) {
            throw InvalidMember("member has an empty boundary");
        }
    }
    parallel_for(n, par, [&](std::size_t j) {
        for (std::size_t k = j + 1; k < n; ++k) {
            const CellMask b = band(ensemble.members[j].region, ensemble.members[k].region);
            for (std::size_t i = 0; i < n; ++i) {
                m.set(i, j, k, mismatch(ensemble.members[i].boundary, b));
            }
        }
    });
    return m;
}

namespace detail {

inline double pair_denominator(std::size_t n, PairCounting counting)
{
    const std::size_t pairs = counting == PairCounting::all_pairs ? MismatchMatrix::pair_count(n)
                                                                  : MismatchMatrix::pair_count(n > 0 ? n - 1 : 0);
    return static_cast<double>(pairs);
}

} // namespace detail

/// D_eps(i): share of pairs (j, k), i not in {j, k}, whose band holds member i
/// with mismatch <= epsilon.
inline std::vector<double> relaxed_depth(const MismatchMatrix& m, double epsilon,
                                         PairCounting counting = PairCounting::all_pairs)
{
    if (!(epsilon >= 0.0 && epsilon < 1.0)) {
        throw InvalidArgument("epsilon must lie in [0, 1)");
    }
    const std::size_t n = m.size();
    const double denom = detail::pair_denominator(n, counting);
    std::vector<double> depth(n, 0.0);
    if (denom == 0.0) {
        return depth;
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t inside = 0;
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = j + 1; k < n; ++k) {
                if (j != i && k != i && m.at(i, j, k) <= epsilon) {
                    ++inside;
                }
            }
        }
        depth[i] = static_cast<double>(inside) / denom;
    }
    return depth;
}

/// Member indices from deepest to shallowest; ties go to the earlier date, then
/// the smaller id. Without keys, ties go to the smaller index.
inline std::vector<std::size_t> rank_by_depth(std::span<const double> depths, std::span<const MemberKey> keys = {})
{
    std::vector<std::size_t> order(depths.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (depths[a] != depths[b]) {
            return depths[a] > depths[b];
        }
        if (!keys.empty()) {
            return keys[a] < keys[b];
        }
        return a < b;
    });
    return order;
}

namespace detail {

inline std::vector<std::size_t> top_half(std::span<const double> depths, std::span<const MemberKey> keys)
{
    auto order = rank_by_depth(depths, keys);
    order.resize((depths.size() + 1) / 2);
    std::sort(order.begin(), order.end());
    return order;
}

/// Index of the smallest epsilon whose top-half set matches the next
/// candidate's and whose deepest member has positive depth; the last index
/// when none qualifies.
inline std::size_t stable_epsilon_index(const std::vector<std::vector<double>>& depths_by_eps,
                                        std::span<const MemberKey> keys)
{
    for (std::size_t e = 0; e + 1 < depths_by_eps.size(); ++e) {
        const auto& d = depths_by_eps[e];
        const bool positive = !d.empty() && *std::max_element(d.begin(), d.end()) > 0.0;
        if (positive && top_half(d, keys) == top_half(depths_by_eps[e + 1], keys)) {
            return e;
        }
    }
    return depths_by_eps.size() - 1;
}

inline void check_epsilon_grid(std::span<const double> grid)
{
    if (grid.empty()) {
        throw InvalidArgument("epsilon grid is empty");
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] >= 0.0 && grid[i] < 1.0)) {
            throw InvalidArgument("epsilon values must lie in [0, 1)");
        }
        if (i > 0 && !(grid[i] > grid[i - 1])) {
            throw InvalidArgument("epsilon grid must be strictly increasing");
        }
    }
}

} // namespace detail

/// {0.00, 0.05, ..., 0.50}
inline std::vector<double> default_epsilon_grid()
{
    std::vector<double> grid;
    for (int i = 0; i <= 10; ++i) {
        grid.push_back(static_cast<double>(i * 5) / 100.0);
    }
    return grid;
}

/// Smallest epsilon on the grid at which the set of the ceil(n/2) deepest
/// members no longer changes when moving to the next candidate, provided some
/// member has positive depth. Falls back to the largest candidate.
inline double select_epsilon(const MismatchMatrix& m, std::span<const double> grid,
                             std::span<const MemberKey> keys = {}, PairCounting counting = PairCounting::all_pairs)
{
    detail::check_epsilon_grid(grid);
    std::vector<std::vector<double>> depths;
    for (double eps : grid) {
        depths.push_back(relaxed_depth(m, eps, counting));
    }
    return grid[detail::stable_epsilon_index(depths, keys)];
}

struct BoxplotOptions {
    std::vector<double> epsilon_grid = default_epsilon_grid();
    PairCounting counting = PairCounting::all_pairs;
};

struct ContourBoxplot {
    double epsilon = 0.0;
    std::vector<double> depths;        // per member, ensemble order
    std::vector<std::size_t> ranking;  // deepest first
    std::size_t median_index = 0;
    std::uint64_t median_id = 0;
    Date median_date;
    CellMask median_region;
    CellMask median_boundary;
    std::size_t central_count = 0; // members in the 50% envelope
    CellMask envelope50;
    CellMask envelope100;
};

/// Union minus intersection of the regions of the chosen members.
inline CellMask union_minus_intersection(const ContourEnsemble& ensemble, std::span<const std::size_t> chosen)
{
    CellMask uni(ensemble.n_lat * ensemble.n_lon);
    CellMask inter = ensemble.members[chosen.front()].region;
    for (auto i : chosen) {
        uni |= ensemble.members[i].region;
        inter &= ensemble.members[i].region;
    }
    return uni.minus(inter);
}

/// Band-depth contour boxplot of an ensemble: selects epsilon on the grid,
/// ranks members by relaxed depth, and derives the median and the 50% / 100%
/// envelopes. Inside-counts for every grid epsilon are gathered in one pass
/// over the pairs, so the n x n(n-1)/2 mismatch matrix is never stored.
inline ContourBoxplot contour_boxplot(const ContourEnsemble& ensemble, const BoxplotOptions& options = {},
                                      Parallelism par = {})
{
    ensemble.validate();
    const std::size_t n = ensemble.members.size();
    if (n < 3) {
        throw InsufficientEnsemble("contour boxplot needs at least 3 members");
    }
    detail::check_epsilon_grid(options.epsilon_grid);
    const auto& grid = options.epsilon_grid;
    const std::size_t n_eps = grid.size();

    std::vector<double> boundary_size(n);
    for (std::size_t i = 0; i < n; ++i) {
        boundary_size[i] = static_cast<double>(ensemble.members[i].boundary.count());
        if (boundary_size[i] == 0.0) {
            throw InvalidMember("member has an empty boundary");
        }
    }

    // inside[j][i * n_eps + e]: pairs (j, k>j) holding member i at grid[e].
    std::vector<std::vector<std::uint32_t>> inside(n, std::vector<std::uint32_t>(n * n_eps, 0));
    parallel_for(n, par, [&](std::size_t j) {
        auto& acc = inside[j];
        for (std::size_t k = j + 1; k < n; ++k) {
            const CellMask b = band(ensemble.members[j].region, ensemble.members[k].region);
            for (std::size_t i = 0; i < n; ++i) {
                if (i == j || i == k) {
                    continue;
                }
                const double mis =
                    static_cast<double>(ensemble.members[i].boundary.count_outside(b)) / boundary_size[i];
                for (std::size_t e = 0; e < n_eps; ++e) {
                    if (mis <= grid[e]) {
                        ++acc[i * n_eps + e];
                    }
                }
            }
        }
    });

    const double denom = detail::pair_denominator(n, options.counting);
    std::vector<std::vector<double>> depths(n_eps, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t e = 0; e < n_eps; ++e) {
            std::size_t total = 0;
            for (std::size_t j = 0; j < n; ++j) {
                total += inside[j][i * n_eps + e];
            }
            depths[e][i] = static_cast<double>(total) / denom;
        }
    }

    const auto keys = ensemble.keys();
    const std::size_t chosen = detail::stable_epsilon_index(depths, keys);

    ContourBoxplot box;
    box.epsilon = grid[chosen];
    box.depths = depths[chosen];
    box.ranking = rank_by_depth(box.depths, keys);
    box.median_index = box.ranking.front();
    const auto& median = ensemble.members[box.median_index];
    box.median_id = median.id;
    box.median_date = median.date;
    box.median_region = median.region;
    box.median_boundary = median.boundary;
    box.central_count = (n + 1) / 2;
    box.envelope50 = union_minus_intersection(
        ensemble, std::span<const std::size_t>(box.ranking.data(), box.central_count));
    box.envelope100 = union_minus_intersection(ensemble, box.ranking);
    return box;
}

/// Per-cell count of days on which the cell lies in a footprint.
struct FrequencyMap {
    std::size_t n_lat = 0;
    std::size_t n_lon = 0;
    std::size_t n_days = 0; // distinct dates in the ensemble
    std::vector<std::uint32_t> counts;

    std::uint64_t total() const { return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}); }

    std::vector<double> fractions() const
    {
        std::vector<double> out(counts.size(), 0.0);
        if (n_days > 0) {
            for (std::size_t i = 0; i < counts.size(); ++i) {
                out[i] = static_cast<double>(counts[i]) / static_cast<double>(n_days);
            }
        }
        return out;
    }
};

/// Counts each cell once per date no matter how many footprints of that date
/// cover it.
inline FrequencyMap frequency_map(std::span<const DatedMask> footprints, std::size_t n_lat, std::size_t n_lon)
{
    std::map<Date, CellMask> per_date;
    for (const auto& fp : footprints) {
        if (fp.mask.size() != n_lat * n_lon) {
            throw ShapeError("footprint on a different raster");
        }
        auto [it, inserted] = per_date.try_emplace(fp.date, fp.mask);
        if (!inserted) {
            it->second |= fp.mask;
        }
    }
    FrequencyMap fm{n_lat, n_lon, per_date.size(), std::vector<std::uint32_t>(n_lat * n_lon, 0)};
    for (const auto& [date, mask] : per_date) {
        for (auto cell : mask.cells()) {
            ++fm.counts[cell];
        }
    }
    return fm;
}

/// Per-calendar-day median outlines and frequency slices along a time axis.
struct TemporalStack {
    std::size_t n_lat = 0;
    std::size_t n_lon = 0;
    std::vector<MonthDay> days;
    std::vector<std::vector<Ring>> medians; // empty where a day has no boxplot
    std::vector<FrequencyMap> frequency;    // all-zero where a day has no map
};

/// Assembles the median stack and the frequency stack over `axis`. Days of the
/// axis missing from either map become empty slices.
inline TemporalStack build_stacks(std::span<const MonthDay> axis, const std::map<MonthDay, ContourBoxplot>& boxplots,
                                  const std::map<MonthDay, FrequencyMap>& frequency, std::size_t n_lat,
                                  std::size_t n_lon)
{
    if (!std::is_sorted(axis.begin(), axis.end()) ||
        std::adjacent_find(axis.begin(), axis.end()) != axis.end()) {
        throw InvalidArgument("stack axis must be strictly increasing");
    }
    auto on_axis = [&](MonthDay md) { return std::binary_search(axis.begin(), axis.end(), md); };
    for (const auto& [md, box] : boxplots) {
        if (!on_axis(md)) {
            throw InvalidArgument("boxplot for " + format_month_day(md) + " is not on the stack axis");
        }
    }
    for (const auto& [md, fm] : frequency) {
        if (!on_axis(md)) {
            throw InvalidArgument("frequency map for " + format_month_day(md) + " is not on the stack axis");
        }
        if (fm.n_lat != n_lat || fm.n_lon != n_lon) {
            throw ShapeError("frequency map on a different raster");
        }
    }

    TemporalStack stack;
    stack.n_lat = n_lat;
    stack.n_lon = n_lon;
    stack.days.assign(axis.begin(), axis.end());
    for (const auto& md : axis) {
        auto box = boxplots.find(md);
        stack.medians.push_back(box == boxplots.end() ? std::vector<Ring>{}
                                                      : trace_rings(box->second.median_region, n_lat, n_lon));
        auto fm = frequency.find(md);
        stack.frequency.push_back(fm == frequency.end()
                                      ? FrequencyMap{n_lat, n_lon, 0, std::vector<std::uint32_t>(n_lat * n_lon, 0)}
                                      : fm->second);
    }
    return stack;
}

} // namespace blocktrack
