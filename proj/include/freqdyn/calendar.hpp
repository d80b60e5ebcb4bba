#ifndef FREQDYN_CALENDAR_HPP
#define FREQDYN_CALENDAR_HPP

#include <compare>
#include <cstdint>
#include <string>

namespace freqdyn {

/// Calendar date (proleptic Gregorian, UTC).
struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    auto operator<=>(const Date&) const = default;
};

/// Days since 1970-01-01.
std::int64_t days_from_civil(const Date& d);
Date civil_from_days(std::int64_t z);

Date add_days(const Date& d, std::int64_t n);
bool is_valid_date(const Date& d);

/// Strict ISO-8601 "YYYY-MM-DD". Throws std::invalid_argument on malformed input.
Date parse_date(const std::string& text);
std::string format_date(const Date& d);

/// UTC epoch milliseconds of date at given hour (00:00 + hour).
std::int64_t epoch_ms(const Date& d, int hour = 0);

} // namespace freqdyn

#endif
