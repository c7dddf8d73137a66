#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace pvfc {

using Date = std::chrono::sys_days;

/// Parses `YYYY-MM-DD`; throws ValidationError on anything else.
Date parse_date(std::string_view text);
std::string format_date(Date d);

/// 1-based day of year (1..366).
int day_of_year(Date d);
int month_of(Date d);

inline Date add_days(Date d, long n) { return d + std::chrono::days{n}; }
inline long days_between(Date from, Date to) { return (to - from).count(); }

} // namespace pvfc
