// Command-line front end: one subcommand per pipeline stage, file in, file out.
// Exit codes: 0 success, 2 usage error, 3 data error.

#include <blocktrack/blocktrack.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bt = blocktrack;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int exit_usage = 2;
constexpr int exit_data = 3;

/// Option values that parse as text but are not meaningful.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <class Fn>
auto usage_checked(const std::string& flag, Fn&& fn)
{
    try {
        return fn();
    } catch (const bt::InvalidArgument& e) {
        throw UsageError(flag + ": " + e.what());
    }
}

/// Parameters, input checksums and per-stage timings of one run, written next
/// to the primary output.
class Manifest {
public:
    explicit Manifest(std::string command) { doc_["command"] = std::move(command); }

    ordered_json& params() { return doc_["parameters"]; }

    void input(const std::string& role, const std::string& path)
    {
        ordered_json in;
        in["role"] = role;
        in["path"] = path;
        in["crc32"] = bt::file_crc32(path);
        if (path.ends_with(".json")) {
            // Container headers also pin their payload.
            try {
                in["payload_crc32"] = bt::read_header(path).crc32;
            } catch (const bt::Error&) {
            }
        }
        doc_["inputs"].push_back(std::move(in));
    }

    void output(const std::string& path) { doc_["outputs"].push_back(path); }

    template <class Fn>
    auto stage(const std::string& name, Fn&& fn)
    {
        const auto t0 = std::chrono::steady_clock::now();
        struct Record {
            Manifest& m;
            std::string name;
            std::chrono::steady_clock::time_point t0;
            ~Record()
            {
                const std::chrono::duration<double, std::milli> dt = std::chrono::steady_clock::now() - t0;
                m.doc_["timings_ms"][name] = dt.count();
            }
        } record{*this, name, t0};
        return fn();
    }

    void write(const std::string& primary_output) const
    {
        bt::write_text(primary_output + ".manifest.json", doc_.dump(2) + "\n");
    }

private:
    ordered_json doc_{{"tool", "blocktrack"}, {"format_version", 1}};
};

struct Common {
    std::optional<unsigned> threads;

    bt::Parallelism parallelism() const
    {
        if (threads) {
            return {*threads};
        }
        if (const char* env = std::getenv("BLOCKTRACK_THREADS"); env != nullptr && *env != '\0') {
            try {
                std::size_t used = 0;
                const long v = std::stol(env, &used);
                if (used == std::string(env).size() && v >= 1) {
                    return {static_cast<unsigned>(v)};
                }
            } catch (const std::exception&) {
            }
            throw UsageError("BLOCKTRACK_THREADS must be a positive integer");
        }
        return {1};
    }
};

bt::Connectivity parse_connectivity(int value)
{
    if (value == 4) {
        return bt::Connectivity::four;
    }
    if (value == 8) {
        return bt::Connectivity::eight;
    }
    throw UsageError("--connectivity must be 4 or 8");
}

bt::LabelSeries windowed(const bt::LabelSeries& labels, const bt::DateWindow& window)
{
    bt::LabelSeries out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (window.contains(labels.dates[i])) {
            out.push_back(labels.dates[i], labels.labels[i] != 0);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

struct PreprocessArgs {
    std::string input;
    std::string out;
    std::string anomaly_out;
    std::string crop;
    std::string block;
    std::size_t harmonics = 6;
    double floor = 100.0;
    bool no_detrend = false;
};

void run_preprocess(const PreprocessArgs& a, const Common& common)
{
    const auto par = common.parallelism();
    std::optional<std::array<double, 4>> crop;
    if (!a.crop.empty()) {
        crop = usage_checked("--crop", [&] {
            const auto v = bt::parse_grid(a.crop);
            if (v.size() != 4) {
                throw bt::InvalidArgument("expected LAT_MIN,LAT_MAX,LON_MIN,LON_MAX");
            }
            return std::array<double, 4>{v[0], v[1], v[2], v[3]};
        });
    }
    std::optional<std::pair<std::size_t, std::size_t>> block;
    if (!a.block.empty()) {
        block = usage_checked("--block-average", [&] {
            const auto v = bt::parse_grid(a.block);
            if (v.size() != 2 || v[0] < 1 || v[1] < 1 || v[0] != std::floor(v[0]) || v[1] != std::floor(v[1])) {
                throw bt::InvalidArgument("expected two positive integers FLAT,FLON");
            }
            return std::pair{static_cast<std::size_t>(v[0]), static_cast<std::size_t>(v[1])};
        });
    }
    if (a.floor < 0.0) {
        throw UsageError("--floor must be non-negative");
    }

    Manifest m("preprocess");
    m.params() = {{"harmonics", a.harmonics}, {"floor", a.floor}, {"detrend", !a.no_detrend},
                  {"crop", a.crop},           {"block_average", a.block}};
    m.input("input", a.input);
    bt::ContainerMeta meta;
    auto series = m.stage("read", [&] { return bt::read_series(a.input, &meta); });
    if (crop) {
        series = m.stage("crop", [&] { return bt::crop_domain(series, (*crop)[0], (*crop)[1], (*crop)[2], (*crop)[3]); });
    }
    if (block) {
        series = m.stage("block_average", [&] {
            return bt::block_average(series, block->first, block->second,
                                     [](const std::string& w) { std::cerr << "warning: " << w << '\n'; });
        });
    }
    const auto result = m.stage("preprocess", [&] {
        return bt::preprocess(series, {a.harmonics, a.floor, !a.no_detrend}, par);
    });
    m.stage("write", [&] {
        bt::write_series(result.normalized, a.out, {meta.variable + "_normalized", "1", 1.0, 0.0});
        m.output(a.out);
        if (!a.anomaly_out.empty()) {
            bt::write_series(result.anomaly, a.anomaly_out, {meta.variable + "_anomaly", meta.units, 1.0, 0.0});
            m.output(a.anomaly_out);
        }
        return 0;
    });
    m.write(a.out);
}

// ---------------------------------------------------------------------------

struct DetectArgs {
    std::string input;
    std::string out;
    std::string footprints_out;
    std::optional<double> lambda;
    std::optional<double> min_overlap;
    std::size_t min_days = 5;
    int connectivity = 4;
    std::string window = "all";
};

void run_detect(const DetectArgs& a, const Common& common)
{
    const auto par = common.parallelism();
    const auto window = usage_checked("--window", [&] { return bt::DateWindow::parse(a.window); });
    const auto conn = parse_connectivity(a.connectivity);
    if (a.min_days == 0) {
        throw UsageError("--min-days must be at least 1");
    }
    Manifest m("detect");
    m.input("input", a.input);
    const auto series = m.stage("read", [&] { return bt::read_series(a.input); });

    // Published optima per calendar kind unless overridden.
    const bool fixed = series.calendar() == bt::CalendarKind::fixed360;
    bt::DetectionParams params;
    params.lambda = a.lambda.value_or(fixed ? 1.0 : 1.2);
    params.min_overlap = a.min_overlap.value_or(31.0);
    params.min_days = a.min_days;
    params.connectivity = conn;
    m.params() = {{"lambda", params.lambda},
                  {"min_overlap", params.min_overlap},
                  {"min_days", params.min_days},
                  {"connectivity", a.connectivity},
                  {"window", window.to_string()},
                  {"calendar", std::string(bt::calendar_name(series.calendar()))}};

    const auto result = m.stage("detect", [&] { return bt::detect(series, params, par); });
    m.stage("write", [&] {
        bt::write_labels(windowed(result.labels.series(), window), a.out);
        m.output(a.out);
        if (!a.footprints_out.empty()) {
            const auto fps = bt::footprint_masks(result);
            bt::write_series(bt::footprint_series(fps, series.grid(), series.calendar(), series.dates()),
                             a.footprints_out, {"footprint", "1", 1.0, 0.0});
            m.output(a.footprints_out);
        }
        return 0;
    });
    m.write(a.out);
}

// ---------------------------------------------------------------------------

struct DG83Args {
    std::string input;
    std::string out;
    std::string footprints_out;
    double sigma = 1.5;
    double floor = 100.0;
    std::size_t min_days = 5;
    std::size_t min_overlap_cells = 1;
    bool latitude_rescale = false;
    bool no_detrend = false;
    std::size_t harmonics = 6;
    int connectivity = 4;
    std::string window = "all";
};

void run_dg83(const DG83Args& a, const Common& common)
{
    const auto par = common.parallelism();
    const auto window = usage_checked("--window", [&] { return bt::DateWindow::parse(a.window); });
    bt::DG83Config cfg;
    cfg.sigma_multiplier = a.sigma;
    cfg.floor = a.floor;
    cfg.min_days = a.min_days;
    cfg.min_overlap_cells = a.min_overlap_cells;
    cfg.latitude_rescale = a.latitude_rescale;
    cfg.connectivity = parse_connectivity(a.connectivity);
    usage_checked("dg83 parameters", [&] {
        cfg.validate();
        return 0;
    });

    Manifest m("dg83");
    m.params() = {{"sigma_multiplier", cfg.sigma_multiplier},
                  {"floor", cfg.floor},
                  {"min_days", cfg.min_days},
                  {"min_overlap_cells", cfg.min_overlap_cells},
                  {"latitude_rescale", cfg.latitude_rescale},
                  {"detrend", !a.no_detrend},
                  {"harmonics", a.harmonics},
                  {"connectivity", a.connectivity},
                  {"window", window.to_string()}};
    m.input("input", a.input);
    const auto raw = m.stage("read", [&] { return bt::read_series(a.input); });
    const auto prep = m.stage("preprocess", [&] {
        return bt::preprocess(raw, {a.harmonics, cfg.floor, !a.no_detrend}, par);
    });
    const auto result = m.stage("dg83", [&] { return bt::dg83_detect(prep.anomaly, prep.cycle, cfg, par); });
    m.stage("write", [&] {
        bt::write_labels(windowed(result.labels.series(), window), a.out);
        m.output(a.out);
        if (!a.footprints_out.empty()) {
            const auto fps = bt::footprint_masks(result);
            bt::write_series(bt::footprint_series(fps, raw.grid(), raw.calendar(), raw.dates()), a.footprints_out,
                             {"footprint", "1", 1.0, 0.0});
            m.output(a.footprints_out);
        }
        return 0;
    });
    m.write(a.out);
}

// ---------------------------------------------------------------------------

struct EvaluateArgs {
    std::string pred;
    std::string truth;
    std::string out;
    std::string monthly_out;
    std::string breakdown_out;
    std::string calendar = "gregorian365";
    std::string window = "jja";
};

void run_evaluate(const EvaluateArgs& a, const Common&)
{
    const auto window = usage_checked("--window", [&] { return bt::DateWindow::parse(a.window); });
    const auto calendar = usage_checked("--calendar", [&] { return bt::parse_calendar(a.calendar); });
    Manifest m("evaluate");
    m.params() = {{"window", window.to_string()}, {"calendar", a.calendar}};
    m.input("pred", a.pred);
    m.input("truth", a.truth);
    const auto pred = m.stage("read", [&] { return bt::read_labels(a.pred); });
    const auto truth = bt::read_labels(a.truth);
    const auto report = m.stage("score", [&] { return bt::score(pred, truth, window); });
    const std::vector<std::pair<std::string, bt::EvalReport>> rows{{"pred", report}};
    bt::write_text(a.out, bt::eval_csv(rows));
    m.output(a.out);
    if (!a.monthly_out.empty()) {
        bt::LabelSeries aligned;
        for (std::size_t i = 0; i < pred.size(); ++i) {
            if (truth.find(pred.dates[i])) {
                aligned.push_back(pred.dates[i], pred.labels[i] != 0);
            }
        }
        bt::LabelSeries ref;
        for (const auto& d : aligned.dates) {
            ref.push_back(d, *truth.find(d));
        }
        bt::write_text(a.monthly_out, bt::monthly_csv(bt::monthly_agreement(aligned, ref)));
        m.output(a.monthly_out);
    }
    if (!a.breakdown_out.empty()) {
        bt::write_text(a.breakdown_out, bt::breakdown_csv(bt::temporal_breakdown(pred, truth, window, calendar)));
        m.output(a.breakdown_out);
    }
    m.write(a.out);
    std::cout << "f1 " << bt::format_number(report.f1) << " precision " << bt::format_number(report.precision)
              << " recall " << bt::format_number(report.recall) << " accuracy "
              << bt::format_number(report.accuracy) << '\n';
}

// ---------------------------------------------------------------------------

struct CompareArgs {
    std::string ours;
    std::string dg83;
    std::string truth;
    std::string out;
    std::string disagreement_out;
    std::string monthly_out;
    std::string window = "jja";
};

void run_compare(const CompareArgs& a, const Common&)
{
    const auto window = usage_checked("--window", [&] { return bt::DateWindow::parse(a.window); });
    Manifest m("compare");
    m.params() = {{"window", window.to_string()}};
    m.input("ours", a.ours);
    m.input("dg83", a.dg83);
    m.input("truth", a.truth);
    const auto ours = bt::read_labels(a.ours);
    const auto dg83 = bt::read_labels(a.dg83);
    const auto truth = bt::read_labels(a.truth);
    const std::vector<std::pair<std::string, bt::EvalReport>> rows{{"ours", bt::score(ours, truth, window)},
                                                                   {"dg83", bt::score(dg83, truth, window)}};
    bt::write_text(a.out, bt::eval_csv(rows));
    m.output(a.out);
    if (!a.disagreement_out.empty()) {
        bt::write_text(a.disagreement_out, bt::disagreement_csv(bt::disagreement_table(ours, dg83, truth, window)));
        m.output(a.disagreement_out);
    }
    if (!a.monthly_out.empty()) {
        bt::write_text(a.monthly_out, bt::monthly_csv(bt::monthly_agreement(ours, dg83)));
        m.output(a.monthly_out);
    }
    m.write(a.out);
}

// ---------------------------------------------------------------------------

struct TuneArgs {
    std::string input;
    std::string truth;
    std::string out;
    std::string lambda_grid = "1.0:2.0:0.1";
    std::string c_grid = "5:40:1";
    std::size_t folds = 5;
    std::size_t min_days = 5;
    int connectivity = 4;
    std::string window = "jja";
    std::string objective = "f1";
};

void run_tune(const TuneArgs& a, const Common& common)
{
    const auto par = common.parallelism();
    bt::TuneOptions opts;
    opts.lambda_grid = usage_checked("--lambda-grid", [&] { return bt::parse_grid(a.lambda_grid); });
    opts.c_grid = usage_checked("--C-grid", [&] { return bt::parse_grid(a.c_grid); });
    opts.window = usage_checked("--window", [&] { return bt::DateWindow::parse(a.window); });
    opts.n_folds = a.folds;
    opts.min_days = a.min_days;
    opts.connectivity = parse_connectivity(a.connectivity);
    if (a.objective == "f1") {
        opts.objective = bt::TuneObjective::f1;
    } else if (a.objective == "balanced") {
        opts.objective = bt::TuneObjective::balanced;
    } else {
        throw UsageError("--objective must be f1 or balanced");
    }
    if (a.min_days == 0) {
        throw UsageError("--min-days must be at least 1");
    }

    Manifest m("tune");
    m.params() = {{"lambda_grid", opts.lambda_grid}, {"c_grid", opts.c_grid},
                  {"folds", opts.n_folds},           {"min_days", opts.min_days},
                  {"connectivity", a.connectivity},  {"window", opts.window.to_string()},
                  {"objective", a.objective}};
    m.input("input", a.input);
    m.input("truth", a.truth);
    const auto series = m.stage("read", [&] { return bt::read_series(a.input); });
    const auto truth = bt::read_labels(a.truth);
    const auto result = m.stage("tune", [&] { return bt::tune(series, truth, opts, par); });
    bt::write_text(a.out, bt::tune_surface_csv(result));
    m.output(a.out);
    m.params()["tuning_years"] = result.tuning_years;
    m.params()["best"] = {{"lambda", result.best_lambda}, {"c", result.best_c}, {"score", result.best_score}};
    m.write(a.out);
    std::cout << "best lambda " << bt::format_number(result.best_lambda) << " C " << bt::format_number(result.best_c)
              << " score " << bt::format_number(result.best_score) << '\n';
}

// ---------------------------------------------------------------------------

struct EnsembleArgs {
    std::string footprints;
    std::string out;
    std::string date;  // MM-DD
    int month = 0;
    std::string window = "jja";
    std::string epsilon_grid = "0:0.5:0.05";
    std::string counting = "all-pairs";
    bool no_members = false;
    std::string summary_out;
    std::string medians_out;
};

bt::BoxplotOptions boxplot_options(const EnsembleArgs& a)
{
    bt::BoxplotOptions opts;
    opts.epsilon_grid = usage_checked("--epsilon-grid", [&] { return bt::parse_grid(a.epsilon_grid); });
    if (a.counting == "all-pairs") {
        opts.counting = bt::PairCounting::all_pairs;
    } else if (a.counting == "excluding-member") {
        opts.counting = bt::PairCounting::excluding_member;
    } else {
        throw UsageError("--pair-counting must be all-pairs or excluding-member");
    }
    return opts;
}

void run_boxplot(const EnsembleArgs& a, const Common& common)
{
    const auto par = common.parallelism();
    const auto opts = boxplot_options(a);
    bt::EnsembleKind kind = bt::EnsembleKind::seasonal;
    std::function<bool(bt::Date)> select;
    std::string selection;
    if (!a.date.empty()) {
        const auto md = usage_checked("--date", [&] { return bt::parse_month_day(a.date); });
        kind = bt::EnsembleKind::daily;
        select = [md](bt::Date d) { return bt::month_day(d) == md; };
        selection = "date:" + bt::format_month_day(md);
    } else if (a.month != 0) {
        if (a.month < 1 || a.month > 12) {
            throw UsageError("--month must be 1..12");
        }
        kind = bt::EnsembleKind::monthly;
        select = [month = a.month](bt::Date d) { return d.month == month; };
        selection = "month:" + std::to_string(a.month);
    } else {
        const auto window = usage_checked("--window", [&] { return bt::DateWindow::parse(a.window); });
        select = [window](bt::Date d) { return window.contains(d); };
        selection = "window:" + window.to_string();
    }

    Manifest m("boxplot");
    m.params() = {{"selection", selection},
                  {"epsilon_grid", opts.epsilon_grid},
                  {"pair_counting", a.counting},
                  {"members", !a.no_members}};
    m.input("footprints", a.footprints);
    const auto series = m.stage("read", [&] { return bt::read_series(a.footprints); });
    const auto fps = bt::footprints_from_series(series);
    const auto& grid = series.grid();
    const auto ensemble = bt::build_ensemble(fps, grid.n_lat(), grid.n_lon(), kind, select);
    const auto box = m.stage("boxplot", [&] { return bt::contour_boxplot(ensemble, opts, par); });
    const auto features = bt::boxplot_features(ensemble, box, !a.no_members);
    bt::write_contours_geojson(features, grid, a.out);
    m.output(a.out);
    if (!a.summary_out.empty()) {
        ordered_json s;
        s["members"] = ensemble.members.size();
        s["epsilon"] = box.epsilon;
        s["median_id"] = box.median_id;
        s["median_date"] = bt::format_date(box.median_date);
        auto ranking = ordered_json::array();
        for (auto i : box.ranking) {
            ranking.push_back({{"member_id", ensemble.members[i].id},
                               {"date", bt::format_date(ensemble.members[i].date)},
                               {"depth", box.depths[i]}});
        }
        s["ranking"] = std::move(ranking);
        bt::write_text(a.summary_out, s.dump(2) + "\n");
        m.output(a.summary_out);
    }
    m.write(a.out);
}

void run_freqmap(const EnsembleArgs& a, const Common&)
{
    const auto window = usage_checked("--window", [&] { return bt::DateWindow::parse(a.window); });
    Manifest m("freqmap");
    m.params() = {{"window", window.to_string()}};
    m.input("footprints", a.footprints);
    const auto series = m.stage("read", [&] { return bt::read_series(a.footprints); });
    std::vector<bt::DatedMask> fps;
    for (auto& fp : bt::footprints_from_series(series)) {
        if (window.contains(fp.date)) {
            fps.push_back(std::move(fp));
        }
    }
    const auto fm = m.stage("freqmap", [&] {
        return bt::frequency_map(fps, series.grid().n_lat(), series.grid().n_lon());
    });
    bt::write_frequency_csv(fm, series.grid(), a.out);
    m.output(a.out);
    m.write(a.out);
}

void run_stack(const EnsembleArgs& a, const Common& common)
{
    const auto par = common.parallelism();
    const auto window = usage_checked("--window", [&] { return bt::DateWindow::parse(a.window); });
    const auto opts = boxplot_options(a);
    Manifest m("stack");
    m.params() = {{"window", window.to_string()}, {"epsilon_grid", opts.epsilon_grid}, {"pair_counting", a.counting}};
    m.input("footprints", a.footprints);
    const auto series = m.stage("read", [&] { return bt::read_series(a.footprints); });
    const auto fps = bt::footprints_from_series(series);
    const auto& grid = series.grid();

    std::vector<bt::MonthDay> axis;
    for (int i = 0; i < bt::cycle_length(series.calendar()); ++i) {
        const auto md = bt::month_day_of_cycle(series.calendar(), i);
        if (window.contains(md)) {
            axis.push_back(md);
        }
    }
    std::map<bt::MonthDay, bt::ContourBoxplot> boxplots;
    std::map<bt::MonthDay, bt::FrequencyMap> freq;
    m.stage("daily_ensembles", [&] {
        for (const auto& md : axis) {
            auto same_day = [md](bt::Date d) { return bt::month_day(d) == md; };
            std::vector<bt::DatedMask> day_fps;
            for (const auto& fp : fps) {
                if (same_day(fp.date)) {
                    day_fps.push_back(fp);
                }
            }
            if (day_fps.empty()) {
                continue;
            }
            freq.emplace(md, bt::frequency_map(day_fps, grid.n_lat(), grid.n_lon()));
            const auto ens = bt::build_ensemble(day_fps, grid.n_lat(), grid.n_lon(), bt::EnsembleKind::daily, same_day);
            if (ens.members.size() >= 3) {
                boxplots.emplace(md, bt::contour_boxplot(ens, opts, par));
            }
        }
        return 0;
    });
    const auto stack = bt::build_stacks(axis, boxplots, freq, grid.n_lat(), grid.n_lon());
    bt::write_volume_vti(stack, grid, a.out);
    m.output(a.out);
    if (!a.medians_out.empty()) {
        bt::write_median_stack_vtp(stack, grid, a.medians_out);
        m.output(a.medians_out);
    }
    m.params()["slices"] = stack.days.size();
    m.params()["slices_with_median"] = boxplots.size();
    m.write(a.out);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Blocking detection, tracking, evaluation and ensemble summaries for daily gridded fields"};
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML configuration file; flags override its values");

    Common common;
    app.add_option("--threads", common.threads, "Worker threads (default: BLOCKTRACK_THREADS or 1)")
        ->check(CLI::PositiveNumber);

    std::function<void()> action;
    auto bind = [&](CLI::App* sub, auto fn, auto& args) {
        sub->callback([&action, &common, fn, &args] { action = [&common, fn, &args] { fn(args, common); }; });
    };

    PreprocessArgs pre;
    auto* s_pre = app.add_subcommand("preprocess", "Seasonal-cycle removal, detrending and normalization");
    s_pre->add_option("--input", pre.input, "Raw height container (JSON header)")->required();
    s_pre->add_option("--out", pre.out, "Normalized anomaly container")->required();
    s_pre->add_option("--anomaly-out", pre.anomaly_out, "Detrended anomaly container in input units");
    s_pre->add_option("--crop", pre.crop, "LAT_MIN,LAT_MAX,LON_MIN,LON_MAX");
    s_pre->add_option("--block-average", pre.block, "FLAT,FLON block factors");
    s_pre->add_option("--harmonics", pre.harmonics, "Fourier harmonics kept in the seasonal cycle")->capture_default_str();
    s_pre->add_option("--floor", pre.floor, "Lower bound of the normalization divisor")->capture_default_str();
    s_pre->add_flag("--no-detrend", pre.no_detrend, "Skip linear detrending");
    bind(s_pre, run_preprocess, pre);

    DetectArgs det;
    auto* s_det = app.add_subcommand("detect", "Threshold-and-track blocking detection");
    s_det->add_option("--input", det.input, "Normalized anomaly container")->required();
    s_det->add_option("--out", det.out, "Labels CSV")->required();
    s_det->add_option("--footprints-out", det.footprints_out, "Container of 0/1 footprint masks");
    s_det->add_option("--lambda", det.lambda, "Anomaly threshold (default 1.2, or 1.0 for 360-day calendars)");
    s_det->add_option("--min-overlap", det.min_overlap, "Minimum cos(lat)-weighted overlap (default 31)");
    s_det->add_option("--min-days", det.min_days, "Minimum trajectory length in days")->capture_default_str();
    s_det->add_option("--connectivity", det.connectivity, "4 or 8")->capture_default_str();
    s_det->add_option("--window", det.window, "Dates written: jja, all or custom:MM-DD:MM-DD")->capture_default_str();
    bind(s_det, run_detect, det);

    DG83Args dg;
    auto* s_dg = app.add_subcommand("dg83", "Baseline persistent-anomaly index on raw heights");
    s_dg->add_option("--input", dg.input, "Raw height container")->required();
    s_dg->add_option("--out", dg.out, "Labels CSV")->required();
    s_dg->add_option("--footprints-out", dg.footprints_out, "Container of 0/1 footprint masks");
    s_dg->add_option("--sigma", dg.sigma, "Threshold in smoothed standard deviations")->capture_default_str();
    s_dg->add_option("--floor", dg.floor, "Minimum anomaly threshold")->capture_default_str();
    s_dg->add_option("--min-days", dg.min_days, "Minimum trajectory length in days")->capture_default_str();
    s_dg->add_option("--min-overlap-cells", dg.min_overlap_cells, "Shared cells needed to link")->capture_default_str();
    s_dg->add_flag("--latitude-rescale", dg.latitude_rescale, "Scale anomalies by sin(45)/sin(lat)");
    s_dg->add_flag("--no-detrend", dg.no_detrend, "Skip linear detrending");
    s_dg->add_option("--harmonics", dg.harmonics, "Fourier harmonics kept in the seasonal cycle")->capture_default_str();
    s_dg->add_option("--connectivity", dg.connectivity, "4 or 8")->capture_default_str();
    s_dg->add_option("--window", dg.window, "Dates written")->capture_default_str();
    bind(s_dg, run_dg83, dg);

    EvaluateArgs ev;
    auto* s_ev = app.add_subcommand("evaluate", "Score labels against ground truth");
    s_ev->add_option("--pred", ev.pred, "Predicted labels CSV")->required();
    s_ev->add_option("--truth", ev.truth, "Ground-truth labels CSV")->required();
    s_ev->add_option("--out", ev.out, "Metrics CSV")->required();
    s_ev->add_option("--monthly-out", ev.monthly_out, "Per-month metrics CSV");
    s_ev->add_option("--breakdown-out", ev.breakdown_out, "Per-calendar-day outcome counts CSV");
    s_ev->add_option("--calendar", ev.calendar, "gregorian365 or fixed360 (for the breakdown)")->capture_default_str();
    s_ev->add_option("--window", ev.window, "Scored dates")->capture_default_str();
    bind(s_ev, run_evaluate, ev);

    CompareArgs cmp;
    auto* s_cmp = app.add_subcommand("compare", "Score two detectors and tabulate their disagreements");
    s_cmp->add_option("--ours", cmp.ours, "Labels of the tracking detector")->required();
    s_cmp->add_option("--dg83", cmp.dg83, "Labels of the baseline")->required();
    s_cmp->add_option("--truth", cmp.truth, "Ground-truth labels")->required();
    s_cmp->add_option("--out", cmp.out, "Metrics CSV, one row per detector")->required();
    s_cmp->add_option("--disagreement-out", cmp.disagreement_out, "Disagreement table CSV");
    s_cmp->add_option("--monthly-out", cmp.monthly_out, "Monthly agreement of the two detectors");
    s_cmp->add_option("--window", cmp.window, "Scored dates")->capture_default_str();
    bind(s_cmp, run_compare, cmp);

    TuneArgs tn;
    auto* s_tn = app.add_subcommand("tune", "Cross-validated grid search over lambda and C");
    s_tn->add_option("--input", tn.input, "Normalized anomaly container")->required();
    s_tn->add_option("--truth", tn.truth, "Ground-truth labels")->required();
    s_tn->add_option("--out", tn.out, "Score surface CSV")->required();
    s_tn->add_option("--lambda-grid", tn.lambda_grid, "START:STOP:STEP or comma list")->capture_default_str();
    s_tn->add_option("--C-grid", tn.c_grid, "START:STOP:STEP or comma list")->capture_default_str();
    s_tn->add_option("--folds", tn.folds, "Cross-validation folds")->capture_default_str();
    s_tn->add_option("--min-days", tn.min_days, "Minimum trajectory length in days")->capture_default_str();
    s_tn->add_option("--connectivity", tn.connectivity, "4 or 8")->capture_default_str();
    s_tn->add_option("--window", tn.window, "Scored dates")->capture_default_str();
    s_tn->add_option("--objective", tn.objective, "f1 or balanced")->capture_default_str();
    bind(s_tn, run_tune, tn);

    auto add_ensemble_options = [](CLI::App* sub, EnsembleArgs& e) {
        sub->add_option("--footprints", e.footprints, "Container of 0/1 footprint masks")->required();
        sub->add_option("--window", e.window, "Dates included")->capture_default_str();
    };
    auto add_depth_options = [](CLI::App* sub, EnsembleArgs& e) {
        sub->add_option("--epsilon-grid", e.epsilon_grid, "Candidate relaxations")->capture_default_str();
        sub->add_option("--pair-counting", e.counting, "all-pairs or excluding-member")->capture_default_str();
    };

    EnsembleArgs bx;
    auto* s_bx = app.add_subcommand("boxplot", "Band-depth contour boxplot of a footprint ensemble");
    add_ensemble_options(s_bx, bx);
    add_depth_options(s_bx, bx);
    s_bx->add_option("--out", bx.out, "GeoJSON contours")->required();
    auto* date_opt = s_bx->add_option("--date", bx.date, "Daily ensemble: MM-DD across years");
    s_bx->add_option("--month", bx.month, "Monthly ensemble: 1..12")->excludes(date_opt);
    s_bx->add_flag("--no-members", bx.no_members, "Omit member contours");
    s_bx->add_option("--summary-out", bx.summary_out, "JSON with epsilon, depths and ranking");
    bind(s_bx, run_boxplot, bx);

    EnsembleArgs fq;
    auto* s_fq = app.add_subcommand("freqmap", "Per-cell count of blocked days");
    add_ensemble_options(s_fq, fq);
    s_fq->add_option("--out", fq.out, "Frequency CSV")->required();
    bind(s_fq, run_freqmap, fq);

    EnsembleArgs st;
    auto* s_st = app.add_subcommand("stack", "Daily median and frequency stacks over a window");
    add_ensemble_options(s_st, st);
    add_depth_options(s_st, st);
    s_st->add_option("--out", st.out, "VTK image data of frequency slices")->required();
    s_st->add_option("--medians-out", st.medians_out, "VTK poly data of median outlines");
    bind(s_st, run_stack, st);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        action();
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_data;
    }
    return 0;
}
