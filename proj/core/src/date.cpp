#include "pvfc/date.hpp"

#include <charconv>

#include <fmt/format.h>

#include "pvfc/errors.hpp"

namespace pvfc {

namespace {

int parse_field(std::string_view text, std::string_view whole) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ValidationError(fmt::format("invalid date '{}'", whole));
    }
    return value;
}

} // namespace

Date parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        throw ValidationError(fmt::format("invalid date '{}', expected YYYY-MM-DD", text));
    }
    const int y = parse_field(text.substr(0, 4), text);
    const int m = parse_field(text.substr(5, 2), text);
    const int d = parse_field(text.substr(8, 2), text);
    const std::chrono::year_month_day ymd{std::chrono::year{y},
                                          std::chrono::month{static_cast<unsigned>(m)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) {
        throw ValidationError(fmt::format("invalid calendar date '{}'", text));
    }
    return Date{ymd};
}

std::string format_date(Date d) {
    const std::chrono::year_month_day ymd{d};
    return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(ymd.year()),
                       static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
}

int day_of_year(Date d) {
    const std::chrono::year_month_day ymd{d};
    const Date jan1{ymd.year() / std::chrono::January / 1};
    return static_cast<int>((d - jan1).count()) + 1;
}

int month_of(Date d) {
    return static_cast<int>(static_cast<unsigned>(std::chrono::year_month_day{d}.month()));
}

} // namespace pvfc
