#include "pvfc/grid_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "pvfc/errors.hpp"

namespace pvfc {

namespace {

constexpr std::array<std::string_view, 8> kMetaColumns{"variable", "lead_days", "lat_min", "lat_max",
                                                       "lon_min",  "lon_max",   "n_lat",   "n_lon"};
constexpr std::array<std::string_view, 4> kRowColumns{"date", "i_lat", "i_lon", "value"};

std::vector<std::string_view> split(std::string_view line, char sep = ',') {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(line.substr(start));
            return parts;
        }
        parts.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

template <typename T>
T parse_number(std::string_view text, const std::string& src, std::size_t line, std::string_view what) {
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ParseError(src, line, fmt::format("cannot parse {} from '{}'", what, text));
    }
    return value;
}

template <std::size_t N>
void check_columns(std::string_view header, const std::array<std::string_view, N>& expected,
                   const std::string& src) {
    const auto got = split(header);
    std::vector<std::string_view> missing;
    for (auto col : expected) {
        if (std::find(got.begin(), got.end(), col) == got.end()) {
            missing.push_back(col);
        }
    }
    if (!missing.empty()) {
        throw SchemaError(fmt::format("{}: missing columns: {}", src, fmt::join(missing, ", ")));
    }
    if (got.size() != N || !std::equal(got.begin(), got.end(), expected.begin())) {
        throw SchemaError(fmt::format("{}: columns must be exactly '{}'", src, fmt::join(expected, ",")));
    }
}

bool next_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) {
        return false;
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    return true;
}

} // namespace

std::string field_file_name(Variable variable, int lead_days) {
    return fmt::format("{}_lead{:02d}.txt", to_string(variable), lead_days);
}

void write_field(std::ostream& out, const GridField& field) {
    const GridSpec& g = field.spec();
    fmt::memory_buffer buf;
    fmt::format_to(std::back_inserter(buf), "{}\n", fmt::join(kMetaColumns, ","));
    fmt::format_to(std::back_inserter(buf), "{},{},{},{},{},{},{},{}\n", to_string(field.variable()),
                   field.lead_days(), g.lat_min, g.lat_max, g.lon_min, g.lon_max, g.n_lat, g.n_lon);
    fmt::format_to(std::back_inserter(buf), "{}\n", fmt::join(kRowColumns, ","));
    for (std::size_t d = 0; d < field.n_days(); ++d) {
        const std::string date = format_date(field.date(d));
        for (std::size_t i = 0; i < g.n_lat; ++i) {
            for (std::size_t j = 0; j < g.n_lon; ++j) {
                fmt::format_to(std::back_inserter(buf), "{},{},{},{}\n", date, i, j, field.at(d, i, j));
            }
        }
        if (buf.size() > (1u << 20)) {
            out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
            buf.clear();
        }
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

GridField read_field(std::istream& in, const std::string& src) {
    std::string line;
    std::size_t line_no = 0;
    auto require_line = [&](std::string_view what) {
        if (!next_line(in, line)) {
            throw ParseError(src, line_no + 1, fmt::format("unexpected end of file, expected {}", what));
        }
        ++line_no;
    };

    require_line("metadata header");
    check_columns(line, kMetaColumns, src);
    require_line("metadata record");
    const auto meta = split(line);
    if (meta.size() != kMetaColumns.size()) {
        throw ParseError(src, line_no, fmt::format("metadata record needs {} fields", kMetaColumns.size()));
    }
    Variable variable{};
    try {
        variable = parse_variable(meta[0]);
    } catch (const ValidationError& e) {
        throw ParseError(src, line_no, e.what());
    }
    const int lead = parse_number<int>(meta[1], src, line_no, "lead_days");
    GridSpec g;
    g.lat_min = parse_number<double>(meta[2], src, line_no, "lat_min");
    g.lat_max = parse_number<double>(meta[3], src, line_no, "lat_max");
    g.lon_min = parse_number<double>(meta[4], src, line_no, "lon_min");
    g.lon_max = parse_number<double>(meta[5], src, line_no, "lon_max");
    g.n_lat = parse_number<std::size_t>(meta[6], src, line_no, "n_lat");
    g.n_lon = parse_number<std::size_t>(meta[7], src, line_no, "n_lon");
    try {
        g.validate();
    } catch (const ValidationError& e) {
        throw ParseError(src, line_no, e.what());
    }
    require_line("row header");
    check_columns(line, kRowColumns, src);

    std::vector<double> values;
    std::optional<Date> first;
    Date current{};
    std::size_t day = 0;
    std::size_t cell = 0;
    while (next_line(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto f = split(line);
        if (f.size() != kRowColumns.size()) {
            throw ParseError(src, line_no, fmt::format("expected 4 fields, got {}", f.size()));
        }
        Date date{};
        try {
            date = parse_date(f[0]);
        } catch (const ValidationError& e) {
            throw ParseError(src, line_no, e.what());
        }
        const auto i = parse_number<std::size_t>(f[1], src, line_no, "i_lat");
        const auto j = parse_number<std::size_t>(f[2], src, line_no, "i_lon");
        const auto v = parse_number<double>(f[3], src, line_no, "value");
        if (!first) {
            first = date;
            current = date;
        }
        if (cell == g.cells()) {
            cell = 0;
            ++day;
            current = add_days(current, 1);
        }
        const Date expected_date = current;
        const std::size_t ei = cell / g.n_lon;
        const std::size_t ej = cell % g.n_lon;
        if (date != expected_date || i != ei || j != ej) {
            throw ParseError(src, line_no,
                             fmt::format("expected row ({},{},{}), found ({},{},{}); rows must be complete "
                                         "and ordered date-major, lat-major",
                                         format_date(expected_date), ei, ej, f[0], i, j));
        }
        values.push_back(v);
        ++cell;
    }
    if (!first) {
        throw ParseError(src, line_no, "no data rows");
    }
    if (cell != g.cells()) {
        throw ParseError(src, line_no,
                         fmt::format("incomplete final day {}: {} of {} cells", format_date(current), cell,
                                     g.cells()));
    }
    try {
        return GridField(g, variable, *first, day + 1, std::move(values), lead);
    } catch (const ValidationError& e) {
        throw ParseError(src, line_no, e.what());
    }
}

void store_field(const GridField& field, const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(fmt::format("cannot open {} for writing", path.string()));
    }
    write_field(out, field);
}

GridField load_field(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw MissingInput(path.string());
    }
    return read_field(in, path.string());
}

} // namespace pvfc
