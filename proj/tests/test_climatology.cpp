#include "support/synthetic.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

namespace bt = blocktrack;

namespace {

std::vector<double> harmonic(std::size_t len, int k, double amp, double phase)
{
    std::vector<double> v(len);
    for (std::size_t t = 0; t < len; ++t) {
        v[t] = amp * std::cos(2.0 * std::numbers::pi * k * static_cast<double>(t) / static_cast<double>(len) + phase);
    }
    return v;
}

// Least-squares projection onto {1, cos, sin of harmonics 1..n} computed with
// long double sums over explicit angles; independent of the library's table.
std::vector<double> projection_oracle(const std::vector<double>& x, int n)
{
    const std::size_t len = x.size();
    std::vector<long double> out(len, 0.0L);
    long double mean = 0.0L;
    for (double v : x) {
        mean += v;
    }
    mean /= static_cast<long double>(len);
    for (auto& o : out) {
        o = mean;
    }
    for (int k = 1; k <= n; ++k) {
        long double a = 0.0L;
        long double b = 0.0L;
        for (std::size_t t = 0; t < len; ++t) {
            const long double ang = 2.0L * std::numbers::pi_v<long double> * k * t / len;
            a += x[t] * std::cos(ang);
            b += x[t] * std::sin(ang);
        }
        for (std::size_t t = 0; t < len; ++t) {
            const long double ang = 2.0L * std::numbers::pi_v<long double> * k * t / len;
            out[t] += 2.0L / len * (a * std::cos(ang) + b * std::sin(ang));
        }
    }
    return {out.begin(), out.end()};
}

double max_abs(const std::vector<double>& v)
{
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

bt::SeasonalCycle flat_cycle(const bt::LatLonGrid& g, double mean, double sd)
{
    bt::SeasonalCycle c;
    c.grid = g;
    c.length = 365;
    c.samples.assign(365, 2);
    c.raw_mean.assign(365 * g.n_cells(), mean);
    c.smoothed_mean = c.raw_mean;
    c.raw_std.assign(365 * g.n_cells(), sd);
    c.smoothed_std = c.raw_std;
    return c;
}

} // namespace

TEST(FourierSmooth, ConstantIsUnchanged)
{
    const std::vector<double> c(365, 5432.1);
    for (double v : bt::fourier_smooth(c)) {
        EXPECT_NEAR(v, 5432.1, 1e-9);
    }
}

TEST(FourierSmooth, KeepsThirdHarmonic)
{
    const auto x = harmonic(365, 3, 80.0, 0.4);
    const auto y = bt::fourier_smooth(x);
    for (std::size_t t = 0; t < x.size(); ++t) {
        EXPECT_NEAR(y[t], x[t], 1e-9 * 80.0);
    }
}

TEST(FourierSmooth, RemovesSeventhHarmonic)
{
    const auto x = harmonic(365, 7, 80.0, 1.1);
    EXPECT_LE(max_abs(bt::fourier_smooth(x)), 1e-9 * 80.0);
    const auto x360 = harmonic(360, 7, 50.0, -0.3);
    EXPECT_LE(max_abs(bt::fourier_smooth(x360)), 1e-9 * 50.0);
}

TEST(FourierSmooth, MatchesProjectionOracle)
{
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n(0.0, 30.0);
    for (std::size_t len : {360u, 365u}) {
        std::vector<double> x(len);
        for (auto& v : x) {
            v = 5500.0 + n(rng);
        }
        const auto y = bt::fourier_smooth(x);
        const auto ref = projection_oracle(x, 6);
        for (std::size_t t = 0; t < len; ++t) {
            EXPECT_NEAR(y[t], ref[t], 1e-9);
        }
    }
}

TEST(FourierSmooth, IdempotentAndMeanPreserving)
{
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-100.0, 100.0);
    std::vector<double> x(365);
    for (auto& v : x) {
        v = 1000.0 + u(rng);
    }
    const auto once = bt::fourier_smooth(x);
    const auto twice = bt::fourier_smooth(once);
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        EXPECT_NEAR(twice[t], once[t], 1e-12 * std::abs(once[t]));
        mx += x[t];
        my += once[t];
    }
    EXPECT_NEAR(my, mx, 1e-12 * std::abs(mx));
}

TEST(FourierSmooth, RejectsBadInput)
{
    EXPECT_THROW(bt::fourier_smooth(std::vector<double>{}), bt::InvalidArgument);
    EXPECT_THROW(bt::fourier_smooth(std::vector<double>(12, 1.0), 6), bt::InvalidArgument);
    std::vector<double> nan(365, 0.0);
    nan[3] = std::nan("");
    EXPECT_THROW(bt::fourier_smooth(nan), bt::InvalidArgument);
}

TEST(LongTermDailyMean, ConstantField)
{
    const auto g = bt::LatLonGrid::regular(60.0, 50.0, 2, 0.0, 10.0, 2);
    const auto s = synth::series_from(g, bt::CalendarKind::gregorian365, synth::years(bt::CalendarKind::gregorian365, 1999, 2),
                                      [](std::size_t, std::size_t, std::size_t) { return 500.0; });
    const auto cyc = bt::long_term_daily_mean(s);
    ASSERT_EQ(cyc.raw_mean.size(), 365u * 4u);
    for (double v : cyc.raw_mean) {
        EXPECT_EQ(v, 500.0);
    }
    for (double v : cyc.smoothed_mean) {
        EXPECT_NEAR(v, 500.0, 1e-9);
    }
}

TEST(LongTermDailyMean, AveragesAcrossYearsAndSkipsLeapDay)
{
    const auto g = bt::LatLonGrid::regular(60.0, 60.0, 1, 0.0, 0.0, 1);
    const auto dates = synth::years(bt::CalendarKind::gregorian365, 2000, 2); // 2000 is a leap year
    const auto s = synth::series_from(g, bt::CalendarKind::gregorian365, dates, [&](std::size_t t, std::size_t, std::size_t) {
        if (bt::is_feb29(dates[t])) {
            return 1e6;
        }
        return dates[t].year == 2000 ? 10.0 : 30.0;
    });
    const auto cyc = bt::seasonal_cycle(s);
    EXPECT_EQ(cyc.raw_mean[0], 20.0);
    EXPECT_EQ(cyc.raw_mean[58], 20.0);
    EXPECT_EQ(cyc.samples[58], 2u);
    EXPECT_EQ(cyc.raw_std[0], 10.0); // population std of {10, 30}
}

TEST(LongTermDailyMean, NeedsTwoYears)
{
    const auto g = bt::LatLonGrid::regular(60.0, 60.0, 1, 0.0, 0.0, 1);
    const auto s = synth::series_from(g, bt::CalendarKind::gregorian365, synth::years(bt::CalendarKind::gregorian365, 2001, 1),
                                      [](std::size_t, std::size_t, std::size_t) { return 1.0; });
    EXPECT_THROW(bt::long_term_daily_mean(s), bt::InsufficientData);
}

TEST(Anomaly, SelfAndOffset)
{
    const auto cal = bt::CalendarKind::gregorian365;
    const auto g = bt::LatLonGrid::regular(60.0, 50.0, 2, 0.0, 10.0, 3);
    const auto dates = synth::years(cal, 2003, 2);
    const auto cyc = flat_cycle(g, 5500.0, 80.0);
    auto clim = [&](std::size_t, std::size_t, std::size_t) { return 5500.0; };
    const auto same = bt::anomaly(synth::series_from(g, cal, dates, clim), cyc);
    for (double v : same.values()) {
        EXPECT_EQ(v, 0.0);
    }
    auto plus = [&](std::size_t, std::size_t, std::size_t) { return 5620.0; };
    const auto shifted = bt::anomaly(synth::series_from(g, cal, dates, plus), cyc);
    for (double v : shifted.values()) {
        EXPECT_EQ(v, 120.0);
    }
}

TEST(Anomaly, LeapDayUsesFebruary28)
{
    const auto cal = bt::CalendarKind::gregorian365;
    const auto g = bt::LatLonGrid::regular(60.0, 60.0, 1, 0.0, 0.0, 1);
    auto cyc = flat_cycle(g, 0.0, 1.0);
    cyc.smoothed_mean[58] = 77.0;
    cyc.smoothed_mean[59] = -5.0;
    const auto s = synth::series_from(g, cal, {{2004, 2, 28}, {2004, 2, 29}, {2004, 3, 1}},
                                      [](std::size_t, std::size_t, std::size_t) { return 100.0; });
    const auto a = bt::anomaly(s, cyc);
    EXPECT_EQ(a.values()[0], 23.0);
    EXPECT_EQ(a.values()[1], 23.0);
    EXPECT_EQ(a.values()[2], 105.0);
}

TEST(Anomaly, RejectsMismatchedGrid)
{
    const auto cal = bt::CalendarKind::gregorian365;
    const auto g = bt::LatLonGrid::regular(60.0, 50.0, 2, 0.0, 10.0, 2);
    const auto other = bt::LatLonGrid::regular(60.0, 50.0, 2, 0.0, 20.0, 2);
    const auto s = synth::series_from(g, cal, {{2004, 1, 1}}, [](std::size_t, std::size_t, std::size_t) { return 0.0; });
    EXPECT_THROW(bt::anomaly(s, flat_cycle(other, 0.0, 1.0)), bt::ShapeError);
}

TEST(Detrend, ExactLineVanishes)
{
    const auto cal = bt::CalendarKind::gregorian365;
    const auto g = bt::LatLonGrid::regular(60.0, 50.0, 2, 0.0, 10.0, 2);
    const auto s = synth::series_from(g, cal, synth::consecutive_dates(cal, {2000, 6, 1}, 400),
                                      [](std::size_t t, std::size_t r, std::size_t c) { return (3.0 + r) * t + 5.0 + c; });
    const auto flat = bt::detrend_linear(s);
    for (double v : flat.values()) {
        EXPECT_NEAR(v, 0.0, 1e-9);
    }
}

TEST(Detrend, OutputHasNoSlopeAndConstantBecomesZero)
{
    const auto cal = bt::CalendarKind::gregorian365;
    const auto g = bt::LatLonGrid::regular(60.0, 50.0, 3, 0.0, 10.0, 3);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0.0, 50.0);
    const auto dates = synth::consecutive_dates(cal, {2000, 1, 1}, 730);
    const auto s = synth::series_from(g, cal, dates, [&](std::size_t, std::size_t, std::size_t) { return n(rng); });
    const auto d = bt::detrend_linear(s);
    for (std::size_t cell = 0; cell < g.n_cells(); ++cell) {
        // Refit the OLS slope on the output.
        const double tm = 0.5 * (dates.size() - 1);
        double stt = 0.0;
        double stv = 0.0;
        double mean = 0.0;
        for (std::size_t t = 0; t < dates.size(); ++t) {
            mean += d.values()[t * g.n_cells() + cell];
        }
        mean /= dates.size();
        for (std::size_t t = 0; t < dates.size(); ++t) {
            stt += (t - tm) * (t - tm);
            stv += (t - tm) * (d.values()[t * g.n_cells() + cell] - mean);
        }
        EXPECT_LT(std::abs(stv / stt), 1e-9);
        EXPECT_LT(std::abs(mean), 1e-9);
    }
    const auto c = synth::series_from(g, cal, dates, [](std::size_t, std::size_t, std::size_t) { return 42.0; });
    const auto zero = bt::detrend_linear(c);
    for (double v : zero.values()) {
        EXPECT_NEAR(v, 0.0, 1e-12);
    }
}

TEST(Normalize, DivisorFloor)
{
    EXPECT_EQ(bt::normalization_divisor(0.0), 100.0);
    EXPECT_EQ(bt::normalization_divisor(50.0), 100.0);
    EXPECT_EQ(bt::normalization_divisor(99.999), 100.0);
    EXPECT_EQ(bt::normalization_divisor(100.001), 100.001);
}

TEST(Normalize, Examples)
{
    const auto cal = bt::CalendarKind::gregorian365;
    const auto g = bt::LatLonGrid::regular(60.0, 60.0, 1, 0.0, 0.0, 1);
    const auto s = synth::series_from(g, cal, {{2000, 1, 1}, {2000, 1, 2}, {2000, 1, 3}},
                                      [](std::size_t t, std::size_t, std::size_t) { return t == 0 ? 150.0 : t == 1 ? 300.0 : 0.0; });
    auto cyc = flat_cycle(g, 0.0, 50.0);
    cyc.smoothed_std[1] = 200.0;
    const auto n = bt::normalize(s, cyc);
    EXPECT_EQ(n.values()[0], 1.5);
    EXPECT_EQ(n.values()[1], 1.5);
    EXPECT_EQ(n.values()[2], 0.0);
    EXPECT_THROW(bt::normalize(s, cyc, -1.0), bt::InvalidArgument);
}

TEST(Normalize, InvariantToStdShiftsBelowFloor)
{
    const auto cal = bt::CalendarKind::gregorian365;
    const auto g = bt::LatLonGrid::regular(60.0, 50.0, 2, 0.0, 10.0, 2);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0.0, 150.0);
    const auto s = synth::series_from(g, cal, synth::consecutive_dates(cal, {2000, 1, 1}, 50),
                                      [&](std::size_t, std::size_t, std::size_t) { return n(rng); });
    const auto a = bt::normalize(s, flat_cycle(g, 0.0, 20.0));
    const auto b = bt::normalize(s, flat_cycle(g, 0.0, 95.0));
    EXPECT_EQ(a.values(), b.values());
}

TEST(Preprocess, DeterministicAcrossThreadCounts)
{
    const auto cal = bt::CalendarKind::gregorian365;
    const auto g = bt::LatLonGrid::regular(70.0, 40.0, 7, -20.0, 20.0, 41);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> n(0.0, 60.0);
    const auto dates = synth::years(cal, 2000, 3);
    const auto s = synth::series_from(g, cal, dates, [&](std::size_t t, std::size_t r, std::size_t) {
        return 5600.0 - 10.0 * r + 50.0 * std::cos(2.0 * std::numbers::pi * t / 365.25) + n(rng);
    });
    const auto one = bt::preprocess(s, {}, {1});
    const auto three = bt::preprocess(s, {}, {3});
    EXPECT_EQ(one.normalized.values(), three.normalized.values());
    EXPECT_EQ(one.cycle.smoothed_std, three.cycle.smoothed_std);
    for (double v : one.cycle.raw_std) {
        EXPECT_GE(v, 0.0);
    }
}
