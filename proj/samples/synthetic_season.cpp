// Writes a small synthetic 500 hPa height archive and matching ground truth so
// the command-line pipeline can be tried end to end:
//
//   synthetic_season OUTDIR
//   blocktrack preprocess --input OUTDIR/raw.json --out OUTDIR/norm.json
//   blocktrack detect --input OUTDIR/norm.json --out OUTDIR/labels.csv --footprints-out OUTDIR/fp.json
//   blocktrack evaluate --pred OUTDIR/labels.csv --truth OUTDIR/truth.csv --out OUTDIR/eval.csv

#include <blocktrack/blocktrack.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <random>

namespace bt = blocktrack;

int main(int argc, char** argv)
{
    if (argc != 2) {
        std::cerr << "usage: synthetic_season OUTDIR\n";
        return 2;
    }
    const std::filesystem::path dir = argv[1];
    std::filesystem::create_directories(dir);

    const auto grid = bt::LatLonGrid::regular(78.0, 40.0, 20, -60.0, 58.0, 60);
    std::vector<bt::Date> dates;
    for (bt::Date d{1991, 1, 1}; d.year < 1997; d = bt::next_day(bt::CalendarKind::gregorian365, d)) {
        dates.push_back(d);
    }

    std::mt19937_64 rng(20240601);
    std::normal_distribution<double> noise(0.0, 40.0);
    std::uniform_int_distribution<int> start_day(0, 80);
    std::uniform_int_distribution<int> duration(3, 12);
    std::uniform_int_distribution<int> centre_col(10, 50);

    // One or two quasi-stationary highs per summer; short ones stay unlabeled.
    struct Event {
        std::size_t first;
        std::size_t days;
        int col;
    };
    std::vector<Event> events;
    for (std::size_t t = 0; t < dates.size(); ++t) {
        if (dates[t].month == 6 && dates[t].day == 1) {
            const std::size_t a = t + static_cast<std::size_t>(start_day(rng));
            events.push_back({a, static_cast<std::size_t>(duration(rng)), centre_col(rng)});
            events.push_back({a + 20, static_cast<std::size_t>(duration(rng)), centre_col(rng)});
        }
    }

    std::vector<double> values(dates.size() * grid.n_cells());
    std::vector<std::uint8_t> truth(dates.size(), 0);
    for (std::size_t t = 0; t < dates.size(); ++t) {
        const double phase = 2.0 * std::numbers::pi * bt::day_of_cycle(bt::CalendarKind::gregorian365, dates[t]) / 365.0;
        for (std::size_t r = 0; r < grid.n_lat(); ++r) {
            for (std::size_t c = 0; c < grid.n_lon(); ++c) {
                const double base = 5600.0 - 6.0 * (grid.lat(r) - 40.0) - 80.0 * std::cos(phase);
                values[t * grid.n_cells() + r * grid.n_lon() + c] = base + noise(rng);
            }
        }
    }
    for (const auto& e : events) {
        for (std::size_t k = 0; k < e.days && e.first + k < dates.size(); ++k) {
            const std::size_t t = e.first + k;
            if (e.days >= 5) {
                truth[t] = 1;
            }
            for (std::size_t r = 0; r < grid.n_lat(); ++r) {
                for (std::size_t c = 0; c < grid.n_lon(); ++c) {
                    const double dr = (static_cast<double>(r) - 9.0) / 3.0;
                    const double dc = (static_cast<double>(c) - e.col - 0.3 * static_cast<double>(k)) / 5.0;
                    values[t * grid.n_cells() + r * grid.n_lon() + c] += 320.0 * std::exp(-0.5 * (dr * dr + dc * dc));
                }
            }
        }
    }

    const bt::DailyFieldSeries series(grid, bt::CalendarKind::gregorian365, dates, std::move(values));
    bt::write_series(series, dir / "raw.json");
    bt::LabelSeries labels;
    for (std::size_t t = 0; t < dates.size(); ++t) {
        labels.push_back(dates[t], truth[t] != 0);
    }
    bt::write_labels(labels, dir / "truth.csv");
    std::cout << "wrote " << (dir / "raw.json").string() << " and " << (dir / "truth.csv").string() << '\n';
    return 0;
}
