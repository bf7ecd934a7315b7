#include "flowrisk/dates.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace flowrisk {
namespace {

// Days-from-civil / civil-from-days after Howard Hinnant's algorithms
// (http://howardhinnant.github.io/date_algorithms.html, public domain).
std::int32_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2) / 5 + static_cast<unsigned>(d) - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int32_t>(doe) - 719468;
}

struct Ymd { int y, m, d; };

Ymd civil_from_days(std::int32_t z) {
    z += 719468;
    const int era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int y = static_cast<int>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return {y + (m <= 2), static_cast<int>(m), static_cast<int>(d)};
}

int days_in_month(int y, int m) {
    static constexpr std::array<int, 12> lengths{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    return (m == 2 && leap) ? 29 : lengths[static_cast<std::size_t>(m - 1)];
}

int parse_int(std::string_view s) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw std::invalid_argument("bad number in date: '" + std::string(s) + "'");
    return value;
}

}  // namespace

Date Date::from_ymd(int year, int month, int day) {
    if (month < 1 || month > 12)
        throw std::invalid_argument("month out of range: " + std::to_string(month));
    if (day < 1 || day > days_in_month(year, month))
        throw std::invalid_argument("day out of range: " + std::to_string(day));
    return Date(days_from_civil(year, month, day));
}

Date Date::parse(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-')
        throw std::invalid_argument("expected YYYY-MM-DD, got '" + std::string(text) + "'");
    return from_ymd(parse_int(text.substr(0, 4)), parse_int(text.substr(5, 2)), parse_int(text.substr(8, 2)));
}

int Date::year() const { return civil_from_days(serial_).y; }
int Date::month() const { return civil_from_days(serial_).m; }
int Date::day() const { return civil_from_days(serial_).d; }

int Date::weekday_mon0() const {
    // serial 0 = 1970-01-01, a Thursday.
    const std::int32_t z = serial_;
    return static_cast<int>(z >= -3 ? (z + 3) % 7 : (z + 4) % 7 + 6);
}

std::string Date::to_string() const {
    const Ymd c = civil_from_days(serial_);
    char buf[11];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", c.y, c.m, c.d);
    return buf;
}

std::string to_string(Date d) { return d.to_string(); }

}  // namespace flowrisk
