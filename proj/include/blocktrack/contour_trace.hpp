#pragma once

#include "cell_mask.hpp"
#include "error.hpp"

#include <algorithm>
#include <cstdint>
#include <vector>

namespace blocktrack {

/// Grid corner: corner (i, j) is the top-left corner of cell (i, j), so
/// i ranges over [0, n_lat] and j over [0, n_lon].
struct Corner {
    std::uint32_t row = 0;
    std::uint32_t col = 0;

    auto operator<=>(const Corner&) const = default;
};

/// Closed polyline along cell edges; points.front() == points.back().
struct Ring {
    std::vector<Corner> points;
    bool hole = false;
};

namespace detail {

struct CrackEdge {
    std::uint32_t start;
    std::uint32_t end;
    std::uint32_t owner; // cell the edge belongs to
};

} // namespace detail

/// Traces the outlines of a cell set along cell edges. Where two set cells
/// touch only at a corner the outline passes from one to the other, so every
/// ring of a 4-connected set is simple. Outer rings and hole rings have
/// opposite orientation; collinear vertices are removed and each ring starts at
/// its lexicographically smallest corner.
inline std::vector<Ring> trace_rings(const CellMask& mask, std::size_t n_lat, std::size_t n_lon)
{
    if (mask.size() != n_lat * n_lon) {
        throw ShapeError("mask size does not match raster dimensions");
    }
    const std::size_t stride = n_lon + 1;
    auto corner_id = [&](std::size_t i, std::size_t j) { return static_cast<std::uint32_t>(i * stride + j); };
    auto inside = [&](long r, long c) {
        return r >= 0 && c >= 0 && r < static_cast<long>(n_lat) && c < static_cast<long>(n_lon) &&
               mask.test(static_cast<std::size_t>(r) * n_lon + static_cast<std::size_t>(c));
    };

    // Each cell is walked (r,c) -> (r+1,c) -> (r+1,c+1) -> (r,c+1) -> (r,c);
    // only sides facing a non-member become edges.
    std::vector<detail::CrackEdge> edges;
    for (auto cell : mask.cells()) {
        const std::size_t r = cell / n_lon;
        const std::size_t c = cell % n_lon;
        const long lr = static_cast<long>(r);
        const long lc = static_cast<long>(c);
        if (!inside(lr, lc - 1)) {
            edges.push_back({corner_id(r, c), corner_id(r + 1, c), cell});
        }
        if (!inside(lr + 1, lc)) {
            edges.push_back({corner_id(r + 1, c), corner_id(r + 1, c + 1), cell});
        }
        if (!inside(lr, lc + 1)) {
            edges.push_back({corner_id(r + 1, c + 1), corner_id(r, c + 1), cell});
        }
        if (!inside(lr - 1, lc)) {
            edges.push_back({corner_id(r, c + 1), corner_id(r, c), cell});
        }
    }
    std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) {
        return a.start != b.start ? a.start < b.start : a.owner < b.owner;
    });

    // At most two edges leave any corner; they are adjacent after sorting.
    std::vector<std::int64_t> first_out((n_lat + 1) * stride, -1);
    for (std::size_t e = edges.size(); e-- > 0;) {
        first_out[edges[e].start] = static_cast<std::int64_t>(e);
    }
    std::vector<std::uint8_t> used(edges.size(), 0);

    // Pairing of incoming to outgoing edges at a corner. At a corner shared by
    // two diagonal set cells the walk crosses over to the other cell.
    auto next_edge = [&](const detail::CrackEdge& incoming) -> std::size_t {
        const auto base = static_cast<std::size_t>(first_out[incoming.end]);
        if (base + 1 < edges.size() && edges[base + 1].start == incoming.end &&
            edges[base].owner == incoming.owner) {
            return base + 1;
        }
        return base;
    };

    std::vector<Ring> rings;
    for (std::size_t seed = 0; seed < edges.size(); ++seed) {
        if (used[seed]) {
            continue;
        }
        std::vector<Corner> loop;
        std::size_t e = seed;
        do {
            used[e] = 1;
            loop.push_back({edges[e].start / static_cast<std::uint32_t>(stride),
                            edges[e].start % static_cast<std::uint32_t>(stride)});
            e = next_edge(edges[e]);
        } while (e != seed);

        // Drop vertices where the walk goes straight on.
        std::vector<Corner> pts;
        const std::size_t n = loop.size();
        for (std::size_t k = 0; k < n; ++k) {
            const Corner& prev = loop[(k + n - 1) % n];
            const Corner& cur = loop[k];
            const Corner& next = loop[(k + 1) % n];
            const bool straight = (prev.row == cur.row && cur.row == next.row) ||
                                  (prev.col == cur.col && cur.col == next.col);
            if (!straight) {
                pts.push_back(cur);
            }
        }
        std::rotate(pts.begin(), std::min_element(pts.begin(), pts.end()), pts.end());

        long long twice_area = 0;
        for (std::size_t k = 0; k < pts.size(); ++k) {
            const Corner& a = pts[k];
            const Corner& b = pts[(k + 1) % pts.size()];
            twice_area += static_cast<long long>(a.col) * b.row - static_cast<long long>(b.col) * a.row;
        }
        pts.push_back(pts.front());
        rings.push_back({std::move(pts), twice_area > 0});
    }
    return rings;
}

} // namespace blocktrack
