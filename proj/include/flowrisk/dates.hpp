#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace flowrisk {

/// Civil calendar date stored as days since 1970-01-01 (proleptic Gregorian).
/// All date arithmetic in the library is in whole days; there are no time
/// zones or intraday timestamps anywhere.
class Date {
public:
    Date() = default;
    static Date from_ymd(int year, int month, int day);
    static Date from_serial(std::int32_t days_since_epoch) { return Date(days_since_epoch); }

    /// Strict ISO-8601 parse of "YYYY-MM-DD". Throws std::invalid_argument.
    static Date parse(std::string_view text);

    int year() const;
    int month() const;
    int day() const;
    std::int32_t serial() const { return serial_; }

    /// 0 = Monday .. 6 = Sunday.
    int weekday_mon0() const;
    bool is_weekday() const { return weekday_mon0() < 5; }

    /// Monday of the ISO week containing this date.
    Date week_start() const { return Date(serial_ - weekday_mon0()); }

    Date operator+(int days) const { return Date(serial_ + days); }
    Date operator-(int days) const { return Date(serial_ - days); }
    /// Whole days from other to this.
    int operator-(Date other) const { return serial_ - other.serial_; }
    Date& operator++() { ++serial_; return *this; }

    auto operator<=>(const Date&) const = default;

    std::string to_string() const;  // "YYYY-MM-DD"

private:
    explicit Date(std::int32_t s) : serial_(s) {}
    std::int32_t serial_ = 0;
};

std::string to_string(Date d);

}  // namespace flowrisk
