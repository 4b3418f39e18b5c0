#pragma once

#include "calendar.hpp"
#include "error.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

namespace blocktrack {

/// Binary per-date labels (blocked / not blocked), dates strictly increasing.
struct LabelSeries {
    std::vector<Date> dates;
    std::vector<std::uint8_t> labels;

    std::size_t size() const { return dates.size(); }

    void push_back(Date d, bool label)
    {
        if (!dates.empty() && !(dates.back() < d)) {
            throw InvalidArgument("label dates must be strictly increasing");
        }
        dates.push_back(d);
        labels.push_back(label ? 1 : 0);
    }

    std::optional<bool> find(Date d) const
    {
        auto it = std::lower_bound(dates.begin(), dates.end(), d);
        if (it == dates.end() || *it != d) {
            return std::nullopt;
        }
        return labels[static_cast<std::size_t>(it - dates.begin())] != 0;
    }

    std::size_t positives() const
    {
        return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), std::uint8_t{1}));
    }

    bool operator==(const LabelSeries&) const = default;
};

} // namespace blocktrack
