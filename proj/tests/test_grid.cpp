#include "support/synthetic.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace bt = blocktrack;

namespace {

bt::LatLonGrid global_one_degree()
{
    // Centers at integer degrees: lat 90..-90, lon 0..359.
    return bt::LatLonGrid::regular(90.0, -90.0, 181, 0.0, 359.0, 360);
}

} // namespace

TEST(Calendar, DayOfCycleFoldsLeapDayOntoFebruary28)
{
    using enum bt::CalendarKind;
    EXPECT_EQ(bt::day_of_cycle(gregorian365, {2000, 1, 1}), 0);
    EXPECT_EQ(bt::day_of_cycle(gregorian365, {2000, 2, 28}), 58);
    EXPECT_EQ(bt::day_of_cycle(gregorian365, {2000, 2, 29}), 58);
    EXPECT_EQ(bt::day_of_cycle(gregorian365, {2000, 3, 1}), 59);
    EXPECT_EQ(bt::day_of_cycle(gregorian365, {2001, 12, 31}), 364);
    EXPECT_EQ(bt::day_of_cycle(fixed360, {2001, 2, 30}), 59);
    EXPECT_EQ(bt::day_of_cycle(fixed360, {2001, 12, 30}), 359);
}

TEST(Calendar, CycleIndexRoundTrips)
{
    for (auto cal : {bt::CalendarKind::gregorian365, bt::CalendarKind::fixed360}) {
        for (int i = 0; i < bt::cycle_length(cal); ++i) {
            const auto md = bt::month_day_of_cycle(cal, i);
            EXPECT_EQ(bt::day_of_cycle(cal, {2001, md.month, md.day}), i);
        }
    }
}

TEST(Calendar, Fixed360HasThirtyDayMonths)
{
    EXPECT_TRUE(bt::is_valid_date(bt::CalendarKind::fixed360, {1990, 2, 30}));
    EXPECT_FALSE(bt::is_valid_date(bt::CalendarKind::fixed360, {1990, 5, 31}));
    EXPECT_FALSE(bt::is_valid_date(bt::CalendarKind::gregorian365, {1990, 2, 29}));
    EXPECT_TRUE(bt::is_valid_date(bt::CalendarKind::gregorian365, {1992, 2, 29}));
    EXPECT_EQ(bt::next_day(bt::CalendarKind::fixed360, {1990, 5, 30}), (bt::Date{1990, 6, 1}));
    EXPECT_EQ(bt::next_day(bt::CalendarKind::gregorian365, {1990, 12, 31}), (bt::Date{1991, 1, 1}));
}

TEST(Calendar, DateTextRoundTrips)
{
    const bt::Date d{1979, 6, 5};
    EXPECT_EQ(bt::format_date(d), "1979-06-05");
    EXPECT_EQ(bt::parse_date("1979-06-05"), d);
    EXPECT_THROW(bt::parse_date("1979-6-5x"), bt::InvalidArgument);
    EXPECT_THROW(bt::parse_date("1979-13-01"), bt::InvalidArgument);
}

TEST(Calendar, WindowsIncludeTheirEndpoints)
{
    const auto jja = bt::DateWindow::jja();
    EXPECT_TRUE(jja.contains(bt::MonthDay{6, 1}));
    EXPECT_TRUE(jja.contains(bt::MonthDay{8, 31}));
    EXPECT_FALSE(jja.contains(bt::MonthDay{5, 31}));
    EXPECT_FALSE(jja.contains(bt::MonthDay{9, 1}));
    const auto winter = bt::DateWindow::parse("custom:12-01:02-28");
    EXPECT_TRUE(winter.contains(bt::MonthDay{1, 15}));
    EXPECT_FALSE(winter.contains(bt::MonthDay{3, 1}));
    EXPECT_EQ(winter.to_string(), "custom:12-01:02-28");
    EXPECT_THROW(bt::DateWindow::parse("summer"), bt::InvalidArgument);
}

TEST(Grid, RejectsNonMonotoneCoordinates)
{
    EXPECT_THROW(bt::LatLonGrid({10.0, 20.0, 15.0}, {0.0, 1.0}), bt::InvalidArgument);
    EXPECT_THROW(bt::LatLonGrid({91.0, 80.0}, {0.0, 1.0}), bt::InvalidArgument);
    EXPECT_THROW(bt::LatLonGrid({}, {0.0}), bt::InvalidArgument);
}

TEST(Grid, EdgesBracketCenters)
{
    const auto g = bt::LatLonGrid::regular(60.0, 50.0, 11, -10.0, 10.0, 21);
    const auto le = g.lat_edges();
    ASSERT_EQ(le.size(), 12u);
    EXPECT_DOUBLE_EQ(le.front(), 60.5);
    EXPECT_DOUBLE_EQ(le.back(), 49.5);
    const auto oe = g.lon_edges();
    EXPECT_DOUBLE_EQ(oe.front(), -10.5);
    EXPECT_DOUBLE_EQ(oe[1], -9.5);
}

TEST(Grid, SeriesRejectsWrongPayloadAndDates)
{
    const auto g = bt::LatLonGrid::regular(1.0, 0.0, 2, 0.0, 1.0, 2);
    EXPECT_THROW(bt::DailyFieldSeries(g, bt::CalendarKind::gregorian365, {{2000, 1, 1}}, std::vector<double>(3)),
                 bt::ShapeError);
    EXPECT_THROW(bt::DailyFieldSeries(g, bt::CalendarKind::gregorian365, {{2000, 1, 2}, {2000, 1, 1}},
                                      std::vector<double>(8)),
                 bt::InvalidArgument);
    EXPECT_THROW(bt::DailyFieldSeries(g, bt::CalendarKind::fixed360, {{2000, 5, 31}}, std::vector<double>(4)),
                 bt::InvalidArgument);
}

TEST(LatitudeWeight, KnownValues)
{
    EXPECT_EQ(bt::latitude_weight(0.0), 1.0);
    EXPECT_NEAR(bt::latitude_weight(90.0), 0.0, 1e-12);
    EXPECT_NEAR(bt::latitude_weight(60.0), 0.5, 1e-15);
    EXPECT_THROW(bt::latitude_weight(90.5), bt::InvalidArgument);
}

TEST(LatitudeWeight, EvenAndDecreasingTowardPoles)
{
    double previous = 2.0;
    for (int lat = 0; lat <= 90; ++lat) {
        const double w = bt::latitude_weight(lat);
        EXPECT_EQ(w, bt::latitude_weight(-lat));
        EXPECT_GE(w, 0.0);
        EXPECT_LE(w, previous);
        previous = w;
    }
}

TEST(BlockAverage, ConstantFieldStaysConstant)
{
    const auto g = bt::LatLonGrid::regular(3.0, 0.0, 4, 0.0, 3.0, 4);
    const auto s = synth::series_from(g, bt::CalendarKind::gregorian365, {{2000, 1, 1}},
                                      [](std::size_t, std::size_t, std::size_t) { return 7.0; });
    const auto out = bt::block_average(s, 2, 2);
    ASSERT_EQ(out.grid().n_lat(), 2u);
    ASSERT_EQ(out.grid().n_lon(), 2u);
    for (double v : out.values()) {
        EXPECT_EQ(v, 7.0);
    }
    EXPECT_DOUBLE_EQ(out.grid().lat(0), 2.5);
    EXPECT_DOUBLE_EQ(out.grid().lon(1), 2.5);
}

TEST(BlockAverage, TwoByTwoToOne)
{
    const auto g = bt::LatLonGrid::regular(1.0, 0.0, 2, 0.0, 1.0, 2);
    const auto s = synth::series_from(g, bt::CalendarKind::gregorian365, {{2000, 1, 1}},
                                      [](std::size_t, std::size_t r, std::size_t c) { return 1.0 + 2.0 * r + c; });
    const auto out = bt::block_average(s, 2, 2);
    ASSERT_EQ(out.values().size(), 1u);
    EXPECT_EQ(out.values()[0], 2.5);
}

TEST(BlockAverage, QuarterDegreeToOneDegree)
{
    const auto g = bt::LatLonGrid::regular(80.0, 20.25, 240, -30.0, 29.75, 240);
    const auto s = synth::series_from(g, bt::CalendarKind::gregorian365, {{2000, 1, 1}},
                                      [](std::size_t, std::size_t r, std::size_t c) { return double(r * 7 + c); });
    const auto out = bt::block_average(s, 4, 4);
    ASSERT_EQ(out.grid().n_lat(), 60u);
    ASSERT_EQ(out.grid().n_lon(), 60u);
    EXPECT_NEAR(std::abs(out.grid().lat(1) - out.grid().lat(0)), 1.0, 1e-12);
    EXPECT_NEAR(out.grid().lon(1) - out.grid().lon(0), 1.0, 1e-12);
}

TEST(BlockAverage, DropsRemainderWithWarning)
{
    const auto g = bt::LatLonGrid::regular(4.0, 0.0, 5, 0.0, 2.0, 3);
    const auto s = synth::series_from(g, bt::CalendarKind::gregorian365, {{2000, 1, 1}},
                                      [](std::size_t, std::size_t, std::size_t) { return 1.0; });
    int warnings = 0;
    const auto out = bt::block_average(s, 2, 2, [&](const std::string&) { ++warnings; });
    EXPECT_EQ(out.grid().n_lat(), 2u);
    EXPECT_EQ(out.grid().n_lon(), 1u);
    EXPECT_GE(warnings, 1);
    EXPECT_THROW(bt::block_average(s, 0, 2), bt::InvalidArgument);
}

TEST(BlockAverage, ComposesMultiplicatively)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto g = bt::LatLonGrid::regular(0.0, 7.0, 8, 0.0, 7.0, 8);
    const auto s = synth::series_from(g, bt::CalendarKind::gregorian365, {{2000, 1, 1}, {2000, 1, 2}},
                                      [&](std::size_t, std::size_t, std::size_t) { return u(rng); });
    const auto twice = bt::block_average(bt::block_average(s, 2, 2), 2, 2);
    const auto once = bt::block_average(s, 4, 4);
    ASSERT_EQ(twice.values().size(), once.values().size());
    for (std::size_t i = 0; i < once.values().size(); ++i) {
        EXPECT_NEAR(twice.values()[i], once.values()[i], 1e-14);
    }
}

TEST(CropDomain, GlobalGridToEuroAtlanticBox)
{
    const auto g = global_one_degree();
    const auto s = synth::series_from(g, bt::CalendarKind::gregorian365, {{2000, 1, 1}},
                                      [](std::size_t, std::size_t r, std::size_t c) { return double(r * 1000 + c); });
    const auto out = bt::crop_domain(s, 30.0, 75.0, -10.0, 40.0);
    EXPECT_EQ(out.grid().n_lat(), 46u);
    EXPECT_EQ(out.grid().n_lon(), 51u);
    EXPECT_EQ(out.grid().lon(0), -10.0);
    EXPECT_EQ(out.grid().lon(50), 40.0);
    // Row for 75N, column for 350E.
    EXPECT_EQ(out.at(0, 0, 0), 15.0 * 1000 + 350);
}

TEST(CropDomain, FullBoundsIsIdentityAndIdempotent)
{
    const auto g = bt::LatLonGrid::regular(70.0, 30.0, 9, -20.0, 20.0, 9);
    const auto s = synth::series_from(g, bt::CalendarKind::gregorian365, {{2000, 1, 1}},
                                      [](std::size_t, std::size_t r, std::size_t c) { return double(r + 10 * c); });
    const auto same = bt::crop_domain(s, 30.0, 70.0, -20.0, 20.0);
    EXPECT_EQ(same.grid(), s.grid());
    EXPECT_EQ(same.values(), s.values());
    const auto once = bt::crop_domain(s, 40.0, 60.0, -5.0, 12.0);
    const auto twice = bt::crop_domain(once, 40.0, 60.0, -5.0, 12.0);
    EXPECT_EQ(once.grid(), twice.grid());
    EXPECT_EQ(once.values(), twice.values());
}

TEST(CropDomain, OutsideWindowIsEmpty)
{
    const auto g = bt::LatLonGrid::regular(70.0, 30.0, 9, -20.0, 20.0, 9);
    const auto s = synth::series_from(g, bt::CalendarKind::gregorian365, {{2000, 1, 1}},
                                      [](std::size_t, std::size_t, std::size_t) { return 0.0; });
    EXPECT_THROW(bt::crop_domain(s, -40.0, -30.0, -20.0, 20.0), bt::EmptyDomain);
    EXPECT_THROW(bt::crop_domain(s, 30.0, 70.0, 100.0, 120.0), bt::EmptyDomain);
}
