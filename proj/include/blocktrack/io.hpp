#pragma once

#include "baseline_dg83.hpp"
#include "calendar.hpp"
#include "cell_mask.hpp"
#include "contour_trace.hpp"
#include "error.hpp"
#include "evaluation.hpp"
#include "grid.hpp"
#include "labels.hpp"
#include "tuning.hpp"
#include "uncertainty.hpp"

#include <json.hpp>
#include <zlib.h>

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace blocktrack {

namespace fs = std::filesystem;

inline constexpr int container_format_version = 1;

/// Shortest decimal text that reads back to the same double.
inline std::string format_number(double v)
{
    std::array<char, 32> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

template <class Int>
    requires std::is_integral_v<Int>
inline std::string format_number(Int v)
{
    std::array<char, 24> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

inline std::uint32_t crc32_of(std::span<const unsigned char> bytes)
{
    uLong crc = crc32(0L, Z_NULL, 0);
    // zlib takes uInt lengths, so feed large buffers in pieces.
    std::size_t offset = 0;
    while (offset < bytes.size()) {
        const std::size_t len = std::min<std::size_t>(bytes.size() - offset, 1u << 30);
        crc = crc32(crc, bytes.data() + offset, static_cast<uInt>(len));
        offset += len;
    }
    return static_cast<std::uint32_t>(crc);
}

inline std::vector<unsigned char> read_bytes(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw IoError("failed reading " + path.string());
    }
    return bytes;
}

inline std::string read_text(const fs::path& path)
{
    const auto bytes = read_bytes(path);
    return std::string(bytes.begin(), bytes.end());
}

inline void write_bytes(const fs::path& path, std::span<const unsigned char> bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot create " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

inline void write_text(const fs::path& path, std::string_view text)
{
    write_bytes(path, {reinterpret_cast<const unsigned char*>(text.data()), text.size()});
}

inline std::uint32_t file_crc32(const fs::path& path) { return crc32_of(read_bytes(path)); }

// ---------------------------------------------------------------------------
// Gridded series container: a JSON header plus a sibling raw payload of
// little-endian float32 values in [date][lat][lon] order.

struct ContainerMeta {
    std::string variable = "z500";
    std::string units = "m";
    double scale_factor = 1.0; // stored = (value - add_offset) / scale_factor
    double add_offset = 0.0;
};

struct ContainerHeader {
    int format_version = container_format_version;
    ContainerMeta meta;
    CalendarKind calendar = CalendarKind::gregorian365;
    std::vector<double> lat;
    std::vector<double> lon;
    std::vector<Date> dates;
    std::string payload;
    std::uint64_t payload_bytes = 0;
    std::uint32_t crc32 = 0;
};

/// Payload file written next to a header: same stem, extension ".bin".
inline fs::path payload_path_for(const fs::path& header_path)
{
    auto p = header_path;
    p.replace_extension(".bin");
    if (p == header_path) {
        throw InvalidArgument("container header path must not end in .bin: " + header_path.string());
    }
    return p;
}

inline std::vector<unsigned char> encode_float32le(std::span<const double> values, const ContainerMeta& meta)
{
    std::vector<unsigned char> bytes(values.size() * 4);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto f = static_cast<float>((values[i] - meta.add_offset) / meta.scale_factor);
        auto bits = std::bit_cast<std::uint32_t>(f);
        for (int b = 0; b < 4; ++b) {
            bytes[i * 4 + static_cast<std::size_t>(b)] = static_cast<unsigned char>(bits >> (8 * b));
        }
    }
    return bytes;
}

inline std::vector<double> decode_float32le(std::span<const unsigned char> bytes, const ContainerMeta& meta)
{
    std::vector<double> values(bytes.size() / 4);
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b) {
            bits |= static_cast<std::uint32_t>(bytes[i * 4 + static_cast<std::size_t>(b)]) << (8 * b);
        }
        values[i] = static_cast<double>(std::bit_cast<float>(bits)) * meta.scale_factor + meta.add_offset;
    }
    return values;
}

inline std::string header_to_json(const ContainerHeader& h)
{
    nlohmann::ordered_json j;
    j["format_version"] = h.format_version;
    j["variable"] = h.meta.variable;
    j["units"] = h.meta.units;
    j["calendar"] = std::string(calendar_name(h.calendar));
    j["n_dates"] = h.dates.size();
    j["n_lat"] = h.lat.size();
    j["n_lon"] = h.lon.size();
    j["lat"] = h.lat;
    j["lon"] = h.lon;
    auto dates = nlohmann::ordered_json::array();
    for (const auto& d : h.dates) {
        dates.push_back(format_date(d));
    }
    j["dates"] = std::move(dates);
    j["dtype"] = "float32le";
    j["scale_factor"] = h.meta.scale_factor;
    j["add_offset"] = h.meta.add_offset;
    j["payload"] = h.payload;
    j["payload_bytes"] = h.payload_bytes;
    j["crc32"] = h.crc32;
    return j.dump(2) + "\n";
}

inline ContainerHeader parse_header(std::string_view text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw MalformedHeader(std::string("header is not valid JSON: ") + e.what());
    }
    ContainerHeader h;
    try {
        h.format_version = j.at("format_version").get<int>();
        if (h.format_version != container_format_version) {
            throw MalformedHeader("unsupported format_version " + std::to_string(h.format_version));
        }
        h.meta.variable = j.at("variable").get<std::string>();
        h.meta.units = j.value("units", std::string{});
        h.calendar = parse_calendar(j.at("calendar").get<std::string>());
        h.lat = j.at("lat").get<std::vector<double>>();
        h.lon = j.at("lon").get<std::vector<double>>();
        for (const auto& d : j.at("dates")) {
            h.dates.push_back(parse_date(d.get<std::string>()));
        }
        if (j.at("dtype").get<std::string>() != "float32le") {
            throw MalformedHeader("unsupported dtype " + j.at("dtype").get<std::string>());
        }
        h.meta.scale_factor = j.value("scale_factor", 1.0);
        h.meta.add_offset = j.value("add_offset", 0.0);
        h.payload = j.at("payload").get<std::string>();
        h.payload_bytes = j.at("payload_bytes").get<std::uint64_t>();
        h.crc32 = j.at("crc32").get<std::uint32_t>();
        if (j.at("n_lat").get<std::size_t>() != h.lat.size() || j.at("n_lon").get<std::size_t>() != h.lon.size() ||
            j.at("n_dates").get<std::size_t>() != h.dates.size()) {
            throw MalformedHeader("declared dimensions disagree with coordinate arrays");
        }
    } catch (const nlohmann::json::exception& e) {
        throw MalformedHeader(std::string("bad header field: ") + e.what());
    } catch (const InvalidArgument& e) {
        throw MalformedHeader(std::string("bad header value: ") + e.what());
    }
    if (!(h.meta.scale_factor != 0.0) || !std::isfinite(h.meta.scale_factor) || !std::isfinite(h.meta.add_offset)) {
        throw MalformedHeader("scale_factor must be finite and non-zero");
    }
    if (h.payload_bytes != 4ull * h.dates.size() * h.lat.size() * h.lon.size()) {
        throw MalformedHeader("payload_bytes " + std::to_string(h.payload_bytes) + " does not match 4 x " +
                              std::to_string(h.dates.size()) + " x " + std::to_string(h.lat.size()) + " x " +
                              std::to_string(h.lon.size()));
    }
    return h;
}

inline ContainerHeader read_header(const fs::path& path) { return parse_header(read_text(path)); }

/// Writes `path` (JSON header) and its sibling payload; returns the header.
inline ContainerHeader write_series(const DailyFieldSeries& series, const fs::path& path, const ContainerMeta& meta = {})
{
    if (!(meta.scale_factor != 0.0)) {
        throw InvalidArgument("scale_factor must be non-zero");
    }
    const auto payload_path = payload_path_for(path);
    const auto bytes = encode_float32le(series.values(), meta);
    ContainerHeader h;
    h.meta = meta;
    h.calendar = series.calendar();
    h.lat = series.grid().lat_centers();
    h.lon = series.grid().lon_centers();
    h.dates = series.dates();
    h.payload = payload_path.filename().string();
    h.payload_bytes = bytes.size();
    h.crc32 = crc32_of(bytes);
    write_bytes(payload_path, bytes);
    write_text(path, header_to_json(h));
    return h;
}

/// Checks the payload against the header and decodes it.
inline DailyFieldSeries series_from_payload(const ContainerHeader& h, std::span<const unsigned char> payload)
{
    if (payload.size() != h.payload_bytes) {
        throw CorruptInput("payload has " + std::to_string(payload.size()) + " bytes, header declares " +
                           std::to_string(h.payload_bytes));
    }
    if (crc32_of(payload) != h.crc32) {
        throw CorruptInput("payload checksum mismatch");
    }
    try {
        return DailyFieldSeries(LatLonGrid(h.lat, h.lon), h.calendar, h.dates, decode_float32le(payload, h.meta));
    } catch (const InvalidArgument& e) {
        throw MalformedHeader(e.what());
    }
}

inline DailyFieldSeries read_series(const fs::path& path, ContainerMeta* meta_out = nullptr)
{
    const auto h = read_header(path);
    const auto payload = read_bytes(path.parent_path() / h.payload);
    auto series = series_from_payload(h, payload);
    if (meta_out != nullptr) {
        *meta_out = h.meta;
    }
    return series;
}

/// Footprints as a 0/1 series over `dates`; dates without a footprint are
/// all-zero slices.
inline DailyFieldSeries footprint_series(std::span<const DatedMask> footprints, const LatLonGrid& grid,
                                         CalendarKind calendar, const std::vector<Date>& dates)
{
    std::vector<double> values(dates.size() * grid.n_cells(), 0.0);
    for (const auto& fp : footprints) {
        auto it = std::lower_bound(dates.begin(), dates.end(), fp.date);
        if (it == dates.end() || *it != fp.date) {
            throw AlignmentError("footprint date " + format_date(fp.date) + " is not on the date axis");
        }
        if (fp.mask.size() != grid.n_cells()) {
            throw ShapeError("footprint on a different raster");
        }
        const auto t = static_cast<std::size_t>(it - dates.begin());
        for (auto cell : fp.mask.cells()) {
            values[t * grid.n_cells() + cell] = 1.0;
        }
    }
    return DailyFieldSeries(grid, calendar, dates, std::move(values));
}

/// Non-empty slices of a 0/1 series; any non-zero value counts as covered.
inline std::vector<DatedMask> footprints_from_series(const DailyFieldSeries& series)
{
    std::vector<DatedMask> out;
    for (std::size_t t = 0; t < series.n_dates(); ++t) {
        CellMask mask(series.grid().n_cells());
        auto s = series.slice(t);
        for (std::size_t c = 0; c < s.size(); ++c) {
            if (s[c] != 0.0) {
                mask.set(c);
            }
        }
        if (!mask.none()) {
            out.push_back({series.dates()[t], std::move(mask)});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Label tables: "date,label" with one row per date.

inline std::string labels_csv(const LabelSeries& labels)
{
    std::string out = "date,label\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out += format_date(labels.dates[i]);
        out += labels.labels[i] != 0 ? ",1\n" : ",0\n";
    }
    return out;
}

inline void write_labels(const LabelSeries& labels, const fs::path& path) { write_text(path, labels_csv(labels)); }

namespace detail {

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

} // namespace detail

/// Rows may come in any order; duplicates and non-binary labels are rejected.
inline LabelSeries parse_labels(std::string_view text)
{
    std::vector<std::pair<Date, bool>> rows;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        auto line = detail::trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (line.starts_with("\xEF\xBB\xBF")) {
            line.remove_prefix(3);
        }
        if (line.empty()) {
            continue;
        }
        if (!header_seen) {
            header_seen = true;
            if (line == "date,label") {
                continue;
            }
        }
        const auto comma = line.find(',');
        if (comma == std::string_view::npos) {
            throw CorruptInput("line " + std::to_string(line_no) + ": expected date,label");
        }
        const auto label = detail::trim(line.substr(comma + 1));
        if (label != "0" && label != "1") {
            throw CorruptInput("line " + std::to_string(line_no) + ": label must be 0 or 1");
        }
        try {
            rows.emplace_back(parse_date(detail::trim(line.substr(0, comma))), label == "1");
        } catch (const InvalidArgument& e) {
            throw CorruptInput("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    LabelSeries out;
    for (const auto& [d, l] : rows) {
        if (!out.dates.empty() && out.dates.back() == d) {
            throw CorruptInput("duplicate date " + format_date(d));
        }
        out.push_back(d, l);
    }
    return out;
}

inline LabelSeries read_labels(const fs::path& path) { return parse_labels(read_text(path)); }

// ---------------------------------------------------------------------------
// Contours as GeoJSON: one LineString feature per traced ring.

struct ContourFeature {
    std::string role; // median, env50, env100 or member
    std::optional<Date> date;
    std::optional<std::uint64_t> member_id;
    std::optional<double> depth;
    CellMask region;
};

/// Members in ensemble order, then the median and both envelopes.
inline std::vector<ContourFeature> boxplot_features(const ContourEnsemble& ensemble, const ContourBoxplot& box,
                                                    bool include_members = true)
{
    std::vector<ContourFeature> out;
    if (include_members) {
        for (std::size_t i = 0; i < ensemble.members.size(); ++i) {
            const auto& m = ensemble.members[i];
            out.push_back({"member", m.date, m.id, box.depths.at(i), m.region});
        }
    }
    out.push_back({"median", box.median_date, box.median_id, box.depths.at(box.median_index), box.median_region});
    out.push_back({"env50", std::nullopt, std::nullopt, std::nullopt, box.envelope50});
    out.push_back({"env100", std::nullopt, std::nullopt, std::nullopt, box.envelope100});
    return out;
}

/// Features whose region is empty produce no output.
inline std::string contours_geojson(std::span<const ContourFeature> features, const LatLonGrid& grid)
{
    const auto lat_e = grid.lat_edges();
    const auto lon_e = grid.lon_edges();
    nlohmann::ordered_json fc;
    fc["type"] = "FeatureCollection";
    fc["format_version"] = container_format_version;
    auto list = nlohmann::ordered_json::array();
    for (const auto& f : features) {
        if (f.region.size() != grid.n_cells()) {
            throw ShapeError("contour region on a different raster");
        }
        if (f.region.none()) {
            continue;
        }
        for (const auto& ring : trace_rings(f.region, grid.n_lat(), grid.n_lon())) {
            auto coords = nlohmann::ordered_json::array();
            for (const auto& p : ring.points) {
                coords.push_back({lon_e[p.col], lat_e[p.row]});
            }
            nlohmann::ordered_json feature;
            feature["type"] = "Feature";
            feature["properties"] = {
                {"role", f.role},
                {"date", f.date ? nlohmann::ordered_json(format_date(*f.date)) : nlohmann::ordered_json()},
                {"member_id", f.member_id ? nlohmann::ordered_json(*f.member_id) : nlohmann::ordered_json()},
                {"depth", f.depth ? nlohmann::ordered_json(*f.depth) : nlohmann::ordered_json()},
                {"ring", ring.hole ? "hole" : "outer"},
            };
            feature["geometry"] = {{"type", "LineString"}, {"coordinates", std::move(coords)}};
            list.push_back(std::move(feature));
        }
    }
    fc["features"] = std::move(list);
    return fc.dump() + "\n";
}

inline void write_contours_geojson(std::span<const ContourFeature> features, const LatLonGrid& grid,
                                   const fs::path& path)
{
    write_text(path, contours_geojson(features, grid));
}

// ---------------------------------------------------------------------------
// Frequency maps and stacks.

/// Header row "lat" then one column per longitude; one row per latitude in
/// grid order.
inline std::string frequency_csv(const FrequencyMap& map, const LatLonGrid& grid)
{
    if (map.n_lat != grid.n_lat() || map.n_lon != grid.n_lon()) {
        throw ShapeError("frequency map does not match the grid");
    }
    std::string out = "lat";
    for (double lon : grid.lon_centers()) {
        out += ',' + format_number(lon);
    }
    out += '\n';
    for (std::size_t r = 0; r < map.n_lat; ++r) {
        out += format_number(grid.lat(r));
        for (std::size_t c = 0; c < map.n_lon; ++c) {
            out += ',' + format_number(map.counts[r * map.n_lon + c]);
        }
        out += '\n';
    }
    return out;
}

inline void write_frequency_csv(const FrequencyMap& map, const LatLonGrid& grid, const fs::path& path)
{
    write_text(path, frequency_csv(map, grid));
}

namespace detail {

// Axis origin and spacing along increasing coordinate, and whether the
// stored order must be reversed to get there.
struct AxisFrame {
    double origin;
    double spacing;
    bool reversed;
};

inline AxisFrame axis_frame(const std::vector<double>& centers)
{
    const bool reversed = centers.size() > 1 && centers.front() > centers.back();
    const double lo = std::min(centers.front(), centers.back());
    const double hi = std::max(centers.front(), centers.back());
    const double spacing = centers.size() > 1 ? (hi - lo) / static_cast<double>(centers.size() - 1) : 1.0;
    return {lo, spacing, reversed};
}

} // namespace detail

/// VTK image data with dimensions (n_lon, n_lat, n_slices); longitude varies
/// fastest and latitude increases along y.
inline std::string volume_vti(const TemporalStack& stack, const LatLonGrid& grid)
{
    if (stack.n_lat != grid.n_lat() || stack.n_lon != grid.n_lon()) {
        throw ShapeError("stack does not match the grid");
    }
    const auto x = detail::axis_frame(grid.lon_centers());
    const auto y = detail::axis_frame(grid.lat_centers());
    const std::size_t nx = grid.n_lon();
    const std::size_t ny = grid.n_lat();
    const std::size_t nz = stack.frequency.size();
    const std::string extent = "0 " + format_number(nx - 1) + " 0 " + format_number(ny - 1) + " 0 " +
                               format_number(nz == 0 ? 0 : nz - 1);
    std::string out = "<?xml version=\"1.0\"?>\n"
                      "<VTKFile type=\"ImageData\" version=\"0.1\" byte_order=\"LittleEndian\">\n";
    out += "  <ImageData WholeExtent=\"" + extent + "\" Origin=\"" + format_number(x.origin) + " " +
           format_number(y.origin) + " 0\" Spacing=\"" + format_number(x.spacing) + " " + format_number(y.spacing) +
           " 1\">\n";
    out += "    <Piece Extent=\"" + extent + "\">\n";
    out += "      <PointData Scalars=\"frequency\">\n";
    out += "        <DataArray type=\"Int32\" Name=\"frequency\" format=\"ascii\">\n";
    for (const auto& slice : stack.frequency) {
        for (std::size_t j = 0; j < ny; ++j) {
            const std::size_t r = y.reversed ? ny - 1 - j : j;
            out += "         ";
            for (std::size_t i = 0; i < nx; ++i) {
                const std::size_t c = x.reversed ? nx - 1 - i : i;
                out += ' ' + format_number(slice.counts[r * nx + c]);
            }
            out += '\n';
        }
    }
    out += "        </DataArray>\n"
           "      </PointData>\n"
           "    </Piece>\n"
           "  </ImageData>\n"
           "</VTKFile>\n";
    return out;
}

inline void write_volume_vti(const TemporalStack& stack, const LatLonGrid& grid, const fs::path& path)
{
    write_text(path, volume_vti(stack, grid));
}

/// VTK poly data holding every median ring as a polyline at z = slice index.
inline std::string median_stack_vtp(const TemporalStack& stack, const LatLonGrid& grid)
{
    const auto lat_e = grid.lat_edges();
    const auto lon_e = grid.lon_edges();
    std::string points;
    std::string connectivity;
    std::string offsets;
    std::size_t n_points = 0;
    std::size_t n_lines = 0;
    for (std::size_t z = 0; z < stack.medians.size(); ++z) {
        for (const auto& ring : stack.medians[z]) {
            for (const auto& p : ring.points) {
                points += "          " + format_number(lon_e[p.col]) + " " + format_number(lat_e[p.row]) + " " +
                          format_number(z) + "\n";
                connectivity += ' ' + format_number(n_points++);
            }
            offsets += ' ' + format_number(n_points);
            ++n_lines;
        }
    }
    std::string out = "<?xml version=\"1.0\"?>\n"
                      "<VTKFile type=\"PolyData\" version=\"0.1\" byte_order=\"LittleEndian\">\n"
                      "  <PolyData>\n";
    out += "    <Piece NumberOfPoints=\"" + format_number(n_points) + "\" NumberOfVerts=\"0\" NumberOfLines=\"" +
           format_number(n_lines) + "\" NumberOfStrips=\"0\" NumberOfPolys=\"0\">\n";
    out += "      <Points>\n"
           "        <DataArray type=\"Float64\" NumberOfComponents=\"3\" format=\"ascii\">\n";
    out += points;
    out += "        </DataArray>\n"
           "      </Points>\n"
           "      <Lines>\n"
           "        <DataArray type=\"Int64\" Name=\"connectivity\" format=\"ascii\">\n";
    out += "         " + connectivity + "\n";
    out += "        </DataArray>\n"
           "        <DataArray type=\"Int64\" Name=\"offsets\" format=\"ascii\">\n";
    out += "         " + offsets + "\n";
    out += "        </DataArray>\n"
           "      </Lines>\n"
           "    </Piece>\n"
           "  </PolyData>\n"
           "</VTKFile>\n";
    return out;
}

inline void write_median_stack_vtp(const TemporalStack& stack, const LatLonGrid& grid, const fs::path& path)
{
    write_text(path, median_stack_vtp(stack, grid));
}

// ---------------------------------------------------------------------------
// Report tables.

inline std::string eval_csv(std::span<const std::pair<std::string, EvalReport>> rows)
{
    std::string out = "method,days,tp,tn,fp,fn,accuracy,precision,recall,f1,positive_pct_pred,positive_pct_truth\n";
    for (const auto& [name, r] : rows) {
        out += name + ',' + format_number(r.total()) + ',' + format_number(r.tp) + ',' + format_number(r.tn) + ',' +
               format_number(r.fp) + ',' + format_number(r.fn) + ',' + format_number(r.accuracy) + ',' +
               format_number(r.precision) + ',' + format_number(r.recall) + ',' + format_number(r.f1) + ',' +
               format_number(100.0 * r.prevalence_pred) + ',' + format_number(100.0 * r.prevalence_truth) + '\n';
    }
    return out;
}

inline std::string disagreement_csv(const DisagreementCounts& t)
{
    std::string out = "truth,only_ours_correct,only_dg83_correct,both_correct,both_incorrect,total\n";
    auto row = [&](const char* name, const DisagreementCounts::Row& r) {
        out += std::string(name) + ',' + format_number(r.only_ours_correct) + ',' +
               format_number(r.only_dg83_correct) + ',' + format_number(r.both_correct) + ',' +
               format_number(r.both_incorrect) + ',' + format_number(r.total()) + '\n';
    };
    row("blocked", t.blocked);
    row("not_blocked", t.not_blocked);
    return out;
}

inline std::string monthly_csv(const std::array<EvalReport, 12>& months)
{
    std::string out = "month,days,tp,tn,fp,fn,accuracy,precision,recall,f1\n";
    for (std::size_t m = 0; m < months.size(); ++m) {
        const auto& r = months[m];
        out += format_number(m + 1) + ',' + format_number(r.total()) + ',' + format_number(r.tp) + ',' +
               format_number(r.tn) + ',' + format_number(r.fp) + ',' + format_number(r.fn) + ',' +
               format_number(r.accuracy) + ',' + format_number(r.precision) + ',' + format_number(r.recall) + ',' +
               format_number(r.f1) + '\n';
    }
    return out;
}

inline std::string breakdown_csv(const TemporalBreakdown& b)
{
    std::string out = "day,absent,tn,tp,fp,fn\n";
    for (const auto& r : b.rows) {
        out += format_month_day(r.day) + ',' + (r.absent ? "1" : "0") + ',' + format_number(r.tn) + ',' +
               format_number(r.tp) + ',' + format_number(r.fp) + ',' + format_number(r.fn) + '\n';
    }
    return out;
}

inline std::string tune_surface_csv(const TuneResult& t)
{
    std::string out = "lambda,c,mean";
    const std::size_t folds = t.surface.empty() ? 0 : t.surface.front().fold_scores.size();
    for (std::size_t f = 0; f < folds; ++f) {
        out += ",fold_" + format_number(f + 1);
    }
    out += '\n';
    for (const auto& row : t.surface) {
        out += format_number(row.lambda) + ',' + format_number(row.c) + ',' + format_number(row.mean);
        for (double s : row.fold_scores) {
            out += ',' + format_number(s);
        }
        out += '\n';
    }
    return out;
}

} // namespace blocktrack
