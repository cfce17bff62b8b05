#pragma once

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "tweetsent/error.hpp"

namespace tweetsent {

// Days since 1970-01-01 for a proleptic Gregorian date (Howard Hinnant's
// days_from_civil).
inline std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = static_cast<int>(yy + (m <= 2));
}

inline bool is_leap_year(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

inline int days_in_month(int y, int m) {
  static const int lens[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap_year(y)) return 29;
  return lens[m - 1];
}

namespace detail {

inline bool parse_fixed_uint(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  int v = 0;
  for (std::size_t i = 0; i < len; ++i) {
    const char c = s[pos + i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  out = v;
  return true;
}

}  // namespace detail

// Parses an RFC 3339 timestamp ("2018-01-02T03:04:05Z", optional fractional
// seconds, 'Z' or a +-HH:MM offset) to UTC epoch seconds. Fractional seconds
// are truncated; the corpus works at second precision.
inline std::int64_t parse_rfc3339(std::string_view s) {
  using detail::parse_fixed_uint;
  int year, month, day, hour, minute, second;
  if (!parse_fixed_uint(s, 0, 4, year) || s.size() < 20 || s[4] != '-' ||
      !parse_fixed_uint(s, 5, 2, month) || s[7] != '-' || !parse_fixed_uint(s, 8, 2, day))
    throw Error("invalid timestamp '" + std::string(s) + "'");
  const char sep = s[10];
  if (sep != 'T' && sep != 't' && sep != ' ')
    throw Error("invalid timestamp '" + std::string(s) + "'");
  if (!parse_fixed_uint(s, 11, 2, hour) || s[13] != ':' || !parse_fixed_uint(s, 14, 2, minute) ||
      s[16] != ':' || !parse_fixed_uint(s, 17, 2, second))
    throw Error("invalid timestamp '" + std::string(s) + "'");
  std::size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    const std::size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == start) throw Error("invalid timestamp '" + std::string(s) + "'");
  }
  std::int64_t offset = 0;
  if (pos >= s.size()) throw Error("invalid timestamp '" + std::string(s) + "': missing timezone");
  const char tz = s[pos];
  if (tz == 'Z' || tz == 'z') {
    ++pos;
  } else if (tz == '+' || tz == '-') {
    int oh, om;
    if (!parse_fixed_uint(s, pos + 1, 2, oh) || pos + 3 >= s.size() || s[pos + 3] != ':' ||
        !parse_fixed_uint(s, pos + 4, 2, om) || oh > 23 || om > 59)
      throw Error("invalid timestamp '" + std::string(s) + "': bad offset");
    offset = static_cast<std::int64_t>(oh) * 3600 + om * 60;
    if (tz == '-') offset = -offset;
    pos += 6;
  } else {
    throw Error("invalid timestamp '" + std::string(s) + "': bad timezone");
  }
  if (pos != s.size()) throw Error("invalid timestamp '" + std::string(s) + "': trailing text");
  if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month) || hour > 23 ||
      minute > 59 || second > 60)
    throw Error("invalid timestamp '" + std::string(s) + "': field out of range");
  if (second == 60) second = 59;  // fold leap seconds
  const std::int64_t days = days_from_civil(year, month, day);
  return days * 86400 + hour * 3600 + minute * 60 + second - offset;
}

// Epoch seconds -> "YYYY-MM-DDTHH:MM:SSZ".
inline std::string format_rfc3339_utc(std::int64_t t) {
  std::int64_t days = t / 86400;
  std::int64_t rem = t % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  int y, m, d;
  civil_from_days(days, y, m, d);
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", y, m, d,
                static_cast<int>(rem / 3600), static_cast<int>((rem % 3600) / 60),
                static_cast<int>(rem % 60));
  return buf;
}

// "YYYY-MM-DD" -> epoch seconds at midnight UTC.
inline std::int64_t parse_date(std::string_view s) {
  using detail::parse_fixed_uint;
  int year, month, day;
  if (s.size() != 10 || !parse_fixed_uint(s, 0, 4, year) || s[4] != '-' ||
      !parse_fixed_uint(s, 5, 2, month) || s[7] != '-' || !parse_fixed_uint(s, 8, 2, day) ||
      month < 1 || month > 12 || day < 1 || day > days_in_month(year, month))
    throw Error("invalid date '" + std::string(s) + "' (expected YYYY-MM-DD)");
  return days_from_civil(year, month, day) * 86400;
}

}  // namespace tweetsent
