#pragma once

#include "error.hpp"

#include <array>
#include <charconv>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace blocktrack {

/// Gregorian365 is the real Gregorian calendar whose climatology index drops
/// Feb 29. Fixed360 is the model calendar with twelve 30-day months.
enum class CalendarKind { gregorian365, fixed360 };

struct Date {
    int year = 1;
    int month = 1;
    int day = 1;

    auto operator<=>(const Date&) const = default;
};

/// A calendar day without a year, used to key daily ensembles and stacks.
struct MonthDay {
    int month = 1;
    int day = 1;

    auto operator<=>(const MonthDay&) const = default;
};

inline MonthDay month_day(Date d) { return {d.month, d.day}; }

inline bool is_leap_year(int year)
{
    return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

inline bool is_feb29(Date d) { return d.month == 2 && d.day == 29; }

inline int days_in_month(CalendarKind cal, int year, int month)
{
    if (month < 1 || month > 12) {
        throw InvalidArgument("month out of range: " + std::to_string(month));
    }
    if (cal == CalendarKind::fixed360) {
        return 30;
    }
    static constexpr std::array<int, 12> lengths{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month == 2 && is_leap_year(year)) {
        return 29;
    }
    return lengths[static_cast<std::size_t>(month - 1)];
}

inline bool is_valid_date(CalendarKind cal, Date d)
{
    return d.month >= 1 && d.month <= 12 && d.day >= 1 && d.day <= days_in_month(cal, d.year, d.month);
}

/// Length of the climatological cycle: 365 or 360.
inline int cycle_length(CalendarKind cal) { return cal == CalendarKind::fixed360 ? 360 : 365; }

/// Climatology index in [0, cycle_length). Gregorian Feb 29 shares Feb 28's slot.
inline int day_of_cycle(CalendarKind cal, Date d)
{
    if (!is_valid_date(cal, d)) {
        throw InvalidArgument("date does not exist in calendar");
    }
    if (cal == CalendarKind::fixed360) {
        return (d.month - 1) * 30 + (d.day - 1);
    }
    static constexpr std::array<int, 12> offsets{0, 31, 59, 90, 120, 151, 181, 212, 243, 273, 304, 334};
    const int day = is_feb29(d) ? 28 : d.day;
    return offsets[static_cast<std::size_t>(d.month - 1)] + day - 1;
}

/// Inverse of day_of_cycle for a non-leap year.
inline MonthDay month_day_of_cycle(CalendarKind cal, int index)
{
    if (index < 0 || index >= cycle_length(cal)) {
        throw InvalidArgument("cycle index out of range");
    }
    int month = 1;
    while (index >= days_in_month(cal, 1, month)) {
        index -= days_in_month(cal, 1, month);
        ++month;
    }
    return {month, index + 1};
}

inline Date next_day(CalendarKind cal, Date d)
{
    if (d.day < days_in_month(cal, d.year, d.month)) {
        return {d.year, d.month, d.day + 1};
    }
    if (d.month < 12) {
        return {d.year, d.month + 1, 1};
    }
    return {d.year + 1, 1, 1};
}

namespace detail {

inline void append_padded(std::string& out, int value, int width)
{
    std::array<char, 16> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value < 0 ? -value : value);
    const auto digits = static_cast<int>(end - buf.data());
    if (value < 0) {
        out.push_back('-');
    }
    for (int i = digits; i < width; ++i) {
        out.push_back('0');
    }
    out.append(buf.data(), end);
}

inline int parse_int(std::string_view text, std::string_view what)
{
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw InvalidArgument("cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
    }
    return value;
}

} // namespace detail

/// "YYYY-MM-DD" for either calendar.
inline std::string format_date(Date d)
{
    std::string out;
    out.reserve(10);
    detail::append_padded(out, d.year, 4);
    out.push_back('-');
    detail::append_padded(out, d.month, 2);
    out.push_back('-');
    detail::append_padded(out, d.day, 2);
    return out;
}

inline std::string format_month_day(MonthDay md)
{
    std::string out;
    detail::append_padded(out, md.month, 2);
    out.push_back('-');
    detail::append_padded(out, md.day, 2);
    return out;
}

inline Date parse_date(std::string_view text)
{
    const auto first = text.find('-', 1);
    const auto second = first == std::string_view::npos ? first : text.find('-', first + 1);
    if (second == std::string_view::npos) {
        throw InvalidArgument("expected YYYY-MM-DD, got '" + std::string(text) + "'");
    }
    const Date d{detail::parse_int(text.substr(0, first), "year"),
                 detail::parse_int(text.substr(first + 1, second - first - 1), "month"),
                 detail::parse_int(text.substr(second + 1), "day")};
    // The text carries no calendar, so accept a date valid in either.
    if (!is_valid_date(CalendarKind::gregorian365, d) && !is_valid_date(CalendarKind::fixed360, d)) {
        throw InvalidArgument("no such date: '" + std::string(text) + "'");
    }
    return d;
}

inline MonthDay parse_month_day(std::string_view text)
{
    const auto dash = text.find('-');
    if (dash == std::string_view::npos) {
        throw InvalidArgument("expected MM-DD, got '" + std::string(text) + "'");
    }
    MonthDay md{detail::parse_int(text.substr(0, dash), "month"), detail::parse_int(text.substr(dash + 1), "day")};
    if (md.month < 1 || md.month > 12 || md.day < 1 || md.day > 31) {
        throw InvalidArgument("calendar day out of range: '" + std::string(text) + "'");
    }
    return md;
}

inline std::string_view calendar_name(CalendarKind cal)
{
    return cal == CalendarKind::fixed360 ? "fixed360" : "gregorian365";
}

inline CalendarKind parse_calendar(std::string_view name)
{
    if (name == "gregorian365") {
        return CalendarKind::gregorian365;
    }
    if (name == "fixed360") {
        return CalendarKind::fixed360;
    }
    throw InvalidArgument("unknown calendar '" + std::string(name) + "'");
}

/// A recurring calendar-day window applied to every year.
class DateWindow {
public:
    enum class Kind { all, jja, custom };

    static DateWindow all() { return DateWindow(Kind::all, {1, 1}, {12, 31}); }
    static DateWindow jja() { return DateWindow(Kind::jja, {6, 1}, {8, 31}); }

    /// Inclusive on both ends; wraps across the new year when first > last.
    static DateWindow custom(MonthDay first, MonthDay last) { return DateWindow(Kind::custom, first, last); }

    /// "jja", "all" or "custom:MM-DD:MM-DD".
    static DateWindow parse(std::string_view text)
    {
        if (text == "jja") {
            return jja();
        }
        if (text == "all") {
            return all();
        }
        constexpr std::string_view prefix = "custom:";
        if (text.substr(0, prefix.size()) == prefix) {
            const auto rest = text.substr(prefix.size());
            const auto colon = rest.find(':');
            if (colon != std::string_view::npos) {
                return custom(parse_month_day(rest.substr(0, colon)), parse_month_day(rest.substr(colon + 1)));
            }
        }
        throw InvalidArgument("window must be jja, all or custom:MM-DD:MM-DD, got '" + std::string(text) + "'");
    }

    bool contains(MonthDay md) const
    {
        if (kind_ == Kind::all) {
            return true;
        }
        if (first_ <= last_) {
            return first_ <= md && md <= last_;
        }
        return md >= first_ || md <= last_;
    }

    bool contains(Date d) const { return contains(month_day(d)); }

    Kind kind() const { return kind_; }
    MonthDay first() const { return first_; }
    MonthDay last() const { return last_; }

    std::string to_string() const
    {
        switch (kind_) {
        case Kind::all:
            return "all";
        case Kind::jja:
            return "jja";
        case Kind::custom:
            break;
        }
        return "custom:" + format_month_day(first_) + ":" + format_month_day(last_);
    }

private:
    DateWindow(Kind kind, MonthDay first, MonthDay last) : kind_(kind), first_(first), last_(last) {}

    Kind kind_;
    MonthDay first_;
    MonthDay last_;
};

/// Stable integer key for a date, YYYYMMDD.
inline std::uint64_t date_key(Date d)
{
    return static_cast<std::uint64_t>(d.year) * 10000u + static_cast<std::uint64_t>(d.month) * 100u +
           static_cast<std::uint64_t>(d.day);
}

} // namespace blocktrack
