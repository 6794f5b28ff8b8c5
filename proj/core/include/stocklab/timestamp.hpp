#pragma once

#include <cstdint>
#include <compare>
#include <string>

namespace stocklab {

/// Calendar timestamp stored as seconds since 1970-01-01 00:00:00 (no
/// timezone handling; all data is treated as civil time).
struct Timestamp {
    std::int64_t seconds = 0;

    auto operator<=>(const Timestamp&) const = default;

    static constexpr std::int64_t seconds_per_day = 86400;

    Timestamp plus_days(double days) const {
        return Timestamp{seconds + static_cast<std::int64_t>(days * seconds_per_day)};
    }
    double days_until(Timestamp other) const {
        return static_cast<double>(other.seconds - seconds) / seconds_per_day;
    }
};

struct CivilTime {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..31
    int hour = 0;
    int minute = 0;
    int second = 0;
};

/// Days since the epoch for a proleptic Gregorian date.
std::int64_t days_from_civil(int year, int month, int day);
CivilTime civil_from_timestamp(Timestamp ts);
Timestamp timestamp_from_civil(const CivilTime& ct);

/// Accepts "YYYY-MM-DD" and "YYYY-MM-DD HH:MM:SS". Returns false if the
/// text does not parse or the fields are out of range.
bool try_parse_timestamp(const std::string& text, Timestamp& out);

/// Formats as "YYYY-MM-DD HH:MM:SS".
std::string format_timestamp(Timestamp ts);

}  // namespace stocklab
