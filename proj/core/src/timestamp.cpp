#include "stocklab/timestamp.hpp"

#include <cstdio>

namespace stocklab {

std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

static void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t year = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
    y = static_cast<int>(year + (m <= 2));
}

CivilTime civil_from_timestamp(Timestamp ts) {
    std::int64_t days = ts.seconds / Timestamp::seconds_per_day;
    std::int64_t sod = ts.seconds % Timestamp::seconds_per_day;
    if (sod < 0) {
        sod += Timestamp::seconds_per_day;
        days -= 1;
    }
    CivilTime ct;
    civil_from_days(days, ct.year, ct.month, ct.day);
    ct.hour = static_cast<int>(sod / 3600);
    ct.minute = static_cast<int>((sod % 3600) / 60);
    ct.second = static_cast<int>(sod % 60);
    return ct;
}

Timestamp timestamp_from_civil(const CivilTime& ct) {
    const std::int64_t days = days_from_civil(ct.year, ct.month, ct.day);
    return Timestamp{days * Timestamp::seconds_per_day + ct.hour * 3600 + ct.minute * 60 + ct.second};
}

static int days_in_month(int y, int m) {
    static const int lengths[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2) {
        const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
        return leap ? 29 : 28;
    }
    return lengths[m - 1];
}

bool try_parse_timestamp(const std::string& text, Timestamp& out) {
    CivilTime ct;
    int n = 0;
    if (std::sscanf(text.c_str(), "%d-%d-%d %d:%d:%d%n", &ct.year, &ct.month, &ct.day,
                    &ct.hour, &ct.minute, &ct.second, &n) == 6 &&
        n == static_cast<int>(text.size())) {
        // fall through to range checks
    } else {
        ct = CivilTime{};
        n = 0;
        if (std::sscanf(text.c_str(), "%d-%d-%d%n", &ct.year, &ct.month, &ct.day, &n) != 3 ||
            n != static_cast<int>(text.size())) {
            return false;
        }
    }
    if (ct.month < 1 || ct.month > 12 || ct.day < 1 || ct.day > days_in_month(ct.year, ct.month) ||
        ct.hour < 0 || ct.hour > 23 || ct.minute < 0 || ct.minute > 59 || ct.second < 0 ||
        ct.second > 59) {
        return false;
    }
    out = timestamp_from_civil(ct);
    return true;
}

std::string format_timestamp(Timestamp ts) {
    const CivilTime ct = civil_from_timestamp(ts);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d %02d:%02d:%02d", ct.year, ct.month, ct.day,
                  ct.hour, ct.minute, ct.second);
    return buf;
}

}  // namespace stocklab
