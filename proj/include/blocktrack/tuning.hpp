#pragma once

#include "calendar.hpp"
#include "detection.hpp"
#include "error.hpp"
#include "evaluation.hpp"
#include "grid.hpp"
#include "labels.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

namespace blocktrack {

enum class TuneObjective {
    f1,       // mean F1 across folds
    balanced, // mean of F1 - |precision - recall|
};

struct TuneOptions {
    std::vector<double> lambda_grid;
    std::vector<double> c_grid;
    std::size_t n_folds = 5;
    std::size_t min_days = 5;
    Connectivity connectivity = Connectivity::four;
    DateWindow window = DateWindow::jja();
    TuneObjective objective = TuneObjective::f1;
};

struct TuneRow {
    double lambda = 0.0;
    double c = 0.0;
    double mean = 0.0;
    std::vector<double> fold_scores;
};

struct TuneResult {
    double best_lambda = 0.0;
    double best_c = 0.0;
    double best_score = 0.0;
    std::vector<TuneRow> surface; // lambda-major, both grids ascending
    std::vector<int> tuning_years;
    std::map<int, std::size_t> fold_of_year;
};

/// Chronologically first ceil(Y/2) distinct years of the series.
inline std::vector<int> tuning_years(const DailyFieldSeries& series)
{
    std::set<int> years;
    for (const auto& d : series.dates()) {
        years.insert(d.year);
    }
    std::vector<int> all(years.begin(), years.end());
    all.resize((all.size() + 1) / 2);
    return all;
}

/// Contiguous blocks of years; the first (Y mod k) folds take one extra year.
inline std::map<int, std::size_t> assign_folds(const std::vector<int>& years, std::size_t n_folds)
{
    if (n_folds == 0 || n_folds > years.size()) {
        throw InvalidArgument("need between 1 and " + std::to_string(years.size()) + " folds");
    }
    std::map<int, std::size_t> folds;
    const std::size_t base = years.size() / n_folds;
    const std::size_t extra = years.size() % n_folds;
    std::size_t y = 0;
    for (std::size_t f = 0; f < n_folds; ++f) {
        const std::size_t size = base + (f < extra ? 1 : 0);
        for (std::size_t k = 0; k < size; ++k) {
            folds[years[y++]] = f;
        }
    }
    return folds;
}

inline double objective_value(const EvalReport& r, TuneObjective objective)
{
    return objective == TuneObjective::f1 ? r.f1 : r.f1 - std::abs(r.precision - r.recall);
}

/// Cross-validated grid search over (lambda, C) on the first half of the years.
/// The detector has no fitted state, so each fold's score is the objective on
/// that fold's years of a single detection run over all tuning years.
/// Components are extracted once per lambda and overlap links once per lambda;
/// each C only filters those links.
inline TuneResult tune(const DailyFieldSeries& normalized, const LabelSeries& truth, const TuneOptions& options,
                       Parallelism par = {})
{
    if (options.lambda_grid.empty() || options.c_grid.empty()) {
        throw InvalidArgument("tuning grids must not be empty");
    }
    auto lambdas = options.lambda_grid;
    auto cs = options.c_grid;
    std::sort(lambdas.begin(), lambdas.end());
    lambdas.erase(std::unique(lambdas.begin(), lambdas.end()), lambdas.end());
    std::sort(cs.begin(), cs.end());
    cs.erase(std::unique(cs.begin(), cs.end()), cs.end());

    TuneResult result;
    result.tuning_years = tuning_years(normalized);
    result.fold_of_year = assign_folds(result.tuning_years, options.n_folds);
    const int last_year = result.tuning_years.back();
    const auto series = normalized.filter_dates([&](Date d) { return d.year <= last_year; });

    // Dates scored by each fold, as indices into the tuning series.
    std::vector<std::vector<std::size_t>> fold_days(options.n_folds);
    std::vector<std::uint8_t> truth_at(series.n_dates(), 0);
    for (std::size_t t = 0; t < series.n_dates(); ++t) {
        const Date d = series.dates()[t];
        if (!options.window.contains(d)) {
            continue;
        }
        const auto label = truth.find(d);
        if (!label) {
            throw AlignmentError("no ground truth for " + format_date(d));
        }
        truth_at[t] = *label ? 1 : 0;
        fold_days[result.fold_of_year.at(d.year)].push_back(t);
    }

    result.surface.resize(lambdas.size() * cs.size());
    for (std::size_t li = 0; li < lambdas.size(); ++li) {
        const auto days = extract_all_components(series, lambdas[li], options.connectivity, par);
        const auto links = candidate_links(days, series.calendar(), series.grid(), par);
        std::vector<std::size_t> node_day;
        for (std::size_t d = 0; d < days.size(); ++d) {
            node_day.insert(node_day.end(), days[d].components.size(), d);
        }

        parallel_for(cs.size(), par, [&](std::size_t ci) {
            const double c = cs[ci];
            const auto chains = detail::longest_chains(
                node_day.size(), links, [c](const TrajectoryEdge& e) { return e.weighted_overlap >= c; });
            std::vector<std::uint8_t> blocked(days.size(), 0);
            for (std::size_t v = 0; v < chains.size(); ++v) {
                if (chains[v] >= options.min_days) {
                    blocked[node_day[v]] = 1;
                }
            }
            TuneRow row{lambdas[li], c, 0.0, {}};
            for (const auto& indices : fold_days) {
                EvalReport r;
                for (auto t : indices) {
                    r.add(blocked[t] != 0, truth_at[t] != 0);
                }
                row.fold_scores.push_back(objective_value(r.finalized(), options.objective));
            }
            double sum = 0.0;
            for (double s : row.fold_scores) {
                sum += s;
            }
            row.mean = sum / static_cast<double>(row.fold_scores.size());
            result.surface[li * cs.size() + ci] = std::move(row);
        });
    }

    // Rows are in ascending (lambda, C) order, so a strict comparison keeps the
    // smaller lambda, then the smaller C, on ties.
    const TuneRow* best = &result.surface.front();
    for (const auto& row : result.surface) {
        if (row.mean > best->mean) {
            best = &row;
        }
    }
    result.best_lambda = best->lambda;
    result.best_c = best->c;
    result.best_score = best->mean;
    return result;
}

/// Grid "start:stop:step" inclusive of stop, values rounded to 12 decimals so
/// that e.g. 1.0:2.0:0.1 yields exactly 1.3.
inline std::vector<double> parse_grid(const std::string& text)
{
    const auto first = text.find(':');
    const auto second = first == std::string::npos ? first : text.find(':', first + 1);
    auto to_double = [&](const std::string& s) {
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size()) {
                throw InvalidArgument("");
            }
            return v;
        } catch (const std::exception&) {
            throw InvalidArgument("bad grid value '" + s + "' in '" + text + "'");
        }
    };
    if (first == std::string::npos) {
        std::vector<double> out;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const auto comma = text.find(',', pos);
            const auto end = comma == std::string::npos ? text.size() : comma;
            out.push_back(to_double(text.substr(pos, end - pos)));
            pos = end + 1;
        }
        return out;
    }
    if (second == std::string::npos) {
        throw InvalidArgument("grid must be start:stop:step or a comma list, got '" + text + "'");
    }
    const double start = to_double(text.substr(0, first));
    const double stop = to_double(text.substr(first + 1, second - first - 1));
    const double step = to_double(text.substr(second + 1));
    if (!(step > 0.0) || stop < start) {
        throw InvalidArgument("grid needs step > 0 and stop >= start: '" + text + "'");
    }
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> out;
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12);
    }
    return out;
}

} // namespace blocktrack
