#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>

#include "vbpv/errors.hpp"

namespace vbpv {

// Civil date-time with an explicit UTC offset. All timestamps the library
// consumes or produces carry their offset; solar computations convert to UT
// internally.
struct DateTime {
    int year = 2000;
    int month = 1;   // 1..12
    int day = 1;     // 1..31
    int hour = 0;    // 0..23
    int minute = 0;  // 0..59
    int second = 0;  // 0..59
    double utc_offset_hours = 0.0;
};

namespace detail {

// Days from 1970-01-01 for a proleptic Gregorian civil date
// (Howard Hinnant's days_from_civil).
constexpr std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u
                         + static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

constexpr void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
    y = static_cast<int>(yy + (m <= 2));
}

constexpr bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

constexpr int days_in_month(int y, int m) {
    constexpr int len[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return (m == 2 && is_leap(y)) ? 29 : len[m - 1];
}

}  // namespace detail

inline void validate(const DateTime& t) {
    if (t.month < 1 || t.month > 12)
        throw InputError("timestamp: month out of range: " + std::to_string(t.month));
    if (t.day < 1 || t.day > detail::days_in_month(t.year, t.month))
        throw InputError("timestamp: day out of range: " + std::to_string(t.day));
    if (t.hour < 0 || t.hour > 23 || t.minute < 0 || t.minute > 59 ||
        t.second < 0 || t.second > 59)
        throw InputError("timestamp: time-of-day out of range");
    if (t.utc_offset_hours < -14.0 || t.utc_offset_hours > 14.0)
        throw InputError("timestamp: utc offset out of range");
}

// Seconds since 1970-01-01T00:00Z.
inline double to_unix_seconds(const DateTime& t) {
    const std::int64_t days = detail::days_from_civil(t.year, t.month, t.day);
    return static_cast<double>(days) * 86400.0 + t.hour * 3600.0 + t.minute * 60.0 +
           t.second - t.utc_offset_hours * 3600.0;
}

// Rebuild a civil timestamp from unix seconds, expressed in the given offset.
inline DateTime from_unix_seconds(double unix_s, double utc_offset_hours) {
    const double local = unix_s + utc_offset_hours * 3600.0;
    std::int64_t whole = static_cast<std::int64_t>(std::floor(local + 0.5));  // nearest second
    std::int64_t days = whole / 86400;
    std::int64_t rem = whole % 86400;
    if (rem < 0) { rem += 86400; days -= 1; }
    DateTime t;
    detail::civil_from_days(days, t.year, t.month, t.day);
    t.hour = static_cast<int>(rem / 3600);
    t.minute = static_cast<int>((rem % 3600) / 60);
    t.second = static_cast<int>(rem % 60);
    t.utc_offset_hours = utc_offset_hours;
    return t;
}

inline DateTime add_minutes(const DateTime& t, double minutes) {
    return from_unix_seconds(to_unix_seconds(t) + minutes * 60.0, t.utc_offset_hours);
}

inline int day_of_year(const DateTime& t) {
    return static_cast<int>(detail::days_from_civil(t.year, t.month, t.day) -
                            detail::days_from_civil(t.year, 1, 1)) + 1;
}

// Local clock time as decimal hours.
inline double local_hours(const DateTime& t) {
    return t.hour + t.minute / 60.0 + t.second / 3600.0;
}

inline bool same_instant(const DateTime& a, const DateTime& b, double tol_s = 0.5) {
    return std::fabs(to_unix_seconds(a) - to_unix_seconds(b)) <= tol_s;
}

inline bool same_civil_date(const DateTime& a, const DateTime& b) {
    return a.year == b.year && a.month == b.month && a.day == b.day;
}

// ISO-8601 with offset, e.g. 2022-06-22T08:00:00+05:30 (Z for +00:00).
inline std::string to_iso8601(const DateTime& t) {
    char buf[40];
    const double off = t.utc_offset_hours;
    if (off == 0.0) {
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ",
                      t.year, t.month, t.day, t.hour, t.minute, t.second);
    } else {
        const int total = static_cast<int>(std::lround(std::fabs(off) * 60.0));
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d%c%02d:%02d",
                      t.year, t.month, t.day, t.hour, t.minute, t.second,
                      off < 0 ? '-' : '+', total / 60, total % 60);
    }
    return buf;
}

inline DateTime parse_iso8601(const std::string& s) {
    DateTime t;
    int oh = 0, om = 0;
    char sign = 0;
    int n = 0;
    // seconds part optional
    if (std::sscanf(s.c_str(), "%d-%d-%dT%d:%d:%d%n", &t.year, &t.month, &t.day,
                    &t.hour, &t.minute, &t.second, &n) != 6) {
        t.second = 0;
        if (std::sscanf(s.c_str(), "%d-%d-%dT%d:%d%n", &t.year, &t.month, &t.day,
                        &t.hour, &t.minute, &n) != 5)
            throw InputError("timestamp: cannot parse '" + s + "'");
    }
    const std::string rest = s.substr(static_cast<std::size_t>(n));
    if (rest.empty())
        throw InputError("timestamp: missing UTC offset in '" + s + "'");
    if (rest == "Z") {
        t.utc_offset_hours = 0.0;
    } else if (std::sscanf(rest.c_str(), "%c%d:%d", &sign, &oh, &om) == 3 &&
               (sign == '+' || sign == '-')) {
        t.utc_offset_hours = (oh + om / 60.0) * (sign == '-' ? -1.0 : 1.0);
    } else {
        throw InputError("timestamp: bad UTC offset in '" + s + "'");
    }
    validate(t);
    return t;
}

inline bool operator<(const DateTime& a, const DateTime& b) {
    return to_unix_seconds(a) < to_unix_seconds(b);
}

}  // namespace vbpv
