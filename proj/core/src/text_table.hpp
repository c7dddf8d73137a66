#pragma once

// Small helpers for the comma-separated text files used across the library.

#include <charconv>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "pvfc/errors.hpp"

namespace pvfc::detail {

inline std::vector<std::string_view> split_csv(std::string_view line, char sep = ',') {
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

inline bool read_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) {
        return false;
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    return true;
}

template <typename T>
T parse_value(std::string_view text, const std::string& src, std::size_t line, std::string_view what) {
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ParseError(src, line, fmt::format("cannot parse {} from '{}'", what, text));
    }
    return value;
}

/// Returns the position of each required column in `header`; throws SchemaError
/// naming every column that is absent.
inline std::vector<std::size_t> column_positions(std::string_view header,
                                                 const std::vector<std::string_view>& required,
                                                 const std::string& src) {
    const auto cols = split_csv(header);
    std::vector<std::size_t> pos;
    std::vector<std::string_view> missing;
    for (auto name : required) {
        std::size_t k = 0;
        while (k < cols.size() && cols[k] != name) {
            ++k;
        }
        if (k == cols.size()) {
            missing.push_back(name);
        }
        pos.push_back(k);
    }
    if (!missing.empty()) {
        throw SchemaError(fmt::format("{}: missing columns: {}", src, fmt::join(missing, ", ")));
    }
    return pos;
}

} // namespace pvfc::detail
