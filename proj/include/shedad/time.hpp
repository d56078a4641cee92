#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace shedad {

// Civil <-> epoch conversions (Howard Hinnant's algorithms, proleptic
// Gregorian).  All timestamps in the library are UTC epoch seconds; local
// day boundaries are handled with a fixed minute offset.

inline std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y = static_cast<int>(yy + (m <= 2));
}

namespace detail {

inline bool parse_uint(std::string_view s, std::size_t pos, std::size_t len, unsigned& out) {
    if (pos + len > s.size()) return false;
    unsigned v = 0;
    for (std::size_t i = 0; i < len; ++i) {
        char c = s[pos + i];
        if (c < '0' || c > '9') return false;
        v = v * 10 + static_cast<unsigned>(c - '0');
    }
    out = v;
    return true;
}

}  // namespace detail

/// Parse "YYYY-MM-DD[T ]HH:MM[:SS]" with optional trailing "Z" or
/// "+HH:MM"/"-HH:MM" offset.  Returns UTC epoch seconds.
inline std::int64_t parse_timestamp(std::string_view s) {
    auto fail = [&]() -> std::int64_t {
        throw DataError("invalid timestamp '" + std::string(s) + "'");
    };
    unsigned y4 = 0, mo = 0, dd = 0, hh = 0, mi = 0, ss = 0;
    if (s.size() < 16) return fail();
    if (!detail::parse_uint(s, 0, 4, y4) || s[4] != '-' ||
        !detail::parse_uint(s, 5, 2, mo) || s[7] != '-' ||
        !detail::parse_uint(s, 8, 2, dd))
        return fail();
    if (s[10] != 'T' && s[10] != ' ') return fail();
    if (!detail::parse_uint(s, 11, 2, hh) || s[13] != ':' ||
        !detail::parse_uint(s, 14, 2, mi))
        return fail();
    std::size_t pos = 16;
    if (pos < s.size() && s[pos] == ':') {
        if (!detail::parse_uint(s, pos + 1, 2, ss)) return fail();
        pos += 3;
    }
    std::int64_t offset = 0;
    if (pos < s.size()) {
        char c = s[pos];
        if (c == 'Z' && pos + 1 == s.size()) {
            // explicit UTC
        } else if ((c == '+' || c == '-') && pos + 6 == s.size() && s[pos + 3] == ':') {
            unsigned oh = 0, om = 0;
            if (!detail::parse_uint(s, pos + 1, 2, oh) || !detail::parse_uint(s, pos + 4, 2, om))
                return fail();
            offset = static_cast<std::int64_t>(oh) * 3600 + om * 60;
            if (c == '-') offset = -offset;
        } else {
            return fail();
        }
    }
    if (mo < 1 || mo > 12 || dd < 1 || dd > 31 || hh > 23 || mi > 59 || ss > 59) return fail();
    std::int64_t days = days_from_civil(static_cast<int>(y4), mo, dd);
    return days * 86400 + hh * 3600 + mi * 60 + ss - offset;
}

/// "YYYY-MM-DDTHH:MM:SSZ"
inline std::string format_timestamp_utc(std::int64_t epoch) {
    std::int64_t days = epoch / 86400;
    std::int64_t rem = epoch % 86400;
    if (rem < 0) {
        rem += 86400;
        days -= 1;
    }
    int y;
    unsigned m, d;
    civil_from_days(days, y, m, d);
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", y, m, d,
                  static_cast<long long>(rem / 3600), static_cast<long long>(rem / 60 % 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

/// "YYYY-MM-DD" for a count of days since the epoch.
inline std::string format_date(std::int64_t epoch_days) {
    int y;
    unsigned m, d;
    civil_from_days(epoch_days, y, m, d);
    char buf[12];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", y, m, d);
    return buf;
}

}  // namespace shedad
