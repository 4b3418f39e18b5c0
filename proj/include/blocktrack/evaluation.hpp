#pragma once

#include "calendar.hpp"
#include "error.hpp"
#include "labels.hpp"

#include <array>
#include <map>
#include <vector>

namespace blocktrack {

/// Confusion counts and the metrics derived from them. Ratios whose
/// denominator is zero are reported as 0.
struct EvalReport {
    std::size_t tp = 0;
    std::size_t tn = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double prevalence_pred = 0.0;
    double prevalence_truth = 0.0;

    std::size_t total() const { return tp + tn + fp + fn; }

    static EvalReport from_counts(std::size_t tp, std::size_t tn, std::size_t fp, std::size_t fn)
    {
        EvalReport r{tp, tn, fp, fn};
        auto ratio = [](std::size_t num, std::size_t den) {
            return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
        };
        const std::size_t n = tp + tn + fp + fn;
        r.accuracy = ratio(tp + tn, n);
        r.precision = ratio(tp, tp + fp);
        r.recall = ratio(tp, tp + fn);
        r.f1 = r.precision + r.recall > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
        r.prevalence_pred = ratio(tp + fp, n);
        r.prevalence_truth = ratio(tp + fn, n);
        return r;
    }

    void add(bool pred, bool truth)
    {
        if (pred && truth) {
            ++tp;
        } else if (!pred && !truth) {
            ++tn;
        } else if (pred) {
            ++fp;
        } else {
            ++fn;
        }
    }

    EvalReport finalized() const { return from_counts(tp, tn, fp, fn); }
};

/// Day-by-day confusion metrics of `pred` against `truth` over the predicted
/// dates inside `window`.
inline EvalReport score(const LabelSeries& pred, const LabelSeries& truth,
                        const DateWindow& window = DateWindow::jja())
{
    EvalReport r;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const Date d = pred.dates[i];
        if (!window.contains(d)) {
            continue;
        }
        const auto t = truth.find(d);
        if (!t) {
            throw AlignmentError("no ground truth for " + format_date(d));
        }
        r.add(pred.labels[i] != 0, *t);
    }
    return r.finalized();
}

/// Agreement of `pred` with `reference` for each calendar month (index 0 is
/// January), treating `reference` as the truth.
inline std::array<EvalReport, 12> monthly_agreement(const LabelSeries& pred, const LabelSeries& reference)
{
    if (pred.dates != reference.dates) {
        throw AlignmentError("label streams cover different dates");
    }
    std::array<EvalReport, 12> months{};
    for (std::size_t i = 0; i < pred.size(); ++i) {
        months[static_cast<std::size_t>(pred.dates[i].month - 1)].add(pred.labels[i] != 0, reference.labels[i] != 0);
    }
    for (auto& m : months) {
        m = m.finalized();
    }
    return months;
}

struct BreakdownRow {
    MonthDay day;
    bool absent = false; // the calendar has no such date
    std::size_t tn = 0;
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tn + tp + fp + fn; }
};

/// Per-calendar-date outcome counts aggregated across years.
struct TemporalBreakdown {
    std::vector<BreakdownRow> rows;
};

/// Rows cover every calendar day of the window in a 365-day year plus any
/// other calendar day present in the data; days the calendar lacks (May 31
/// under Fixed360) are kept as zero rows flagged absent. Predicted dates
/// without truth are skipped.
inline TemporalBreakdown temporal_breakdown(const LabelSeries& pred, const LabelSeries& truth,
                                            const DateWindow& window, CalendarKind calendar)
{
    std::map<MonthDay, BreakdownRow> rows;
    for (int index = 0; index < cycle_length(CalendarKind::gregorian365); ++index) {
        const MonthDay md = month_day_of_cycle(CalendarKind::gregorian365, index);
        if (window.contains(md)) {
            rows[md].day = md;
        }
    }
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const Date d = pred.dates[i];
        if (!window.contains(d)) {
            continue;
        }
        const auto t = truth.find(d);
        if (!t) {
            continue;
        }
        auto& row = rows[month_day(d)];
        row.day = month_day(d);
        const bool p = pred.labels[i] != 0;
        if (p && *t) {
            ++row.tp;
        } else if (!p && !*t) {
            ++row.tn;
        } else if (p) {
            ++row.fp;
        } else {
            ++row.fn;
        }
    }
    TemporalBreakdown out;
    for (auto& [md, row] : rows) {
        // Day 29 of February exists in leap years, so probe a leap year.
        row.absent = !is_valid_date(calendar, {2000, md.month, md.day});
        out.rows.push_back(row);
    }
    return out;
}

} // namespace blocktrack
