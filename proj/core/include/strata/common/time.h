#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace strata {

// Half-open span [begin, end) in seconds since the Unix epoch. An ISO-8601
// value covers the span implied by its precision: "2023" is a whole year,
// "2023-05-08" a whole day, "2023-05-08T13:56:00Z" a single second.
struct TimeSpan {
  std::int64_t begin = 0;
  std::int64_t end = 0;

  friend bool operator==(const TimeSpan&, const TimeSpan&) = default;
};

// Accepts YYYY, YYYY-MM, YYYY-MM-DD and YYYY-MM-DDThh:mm[:ss[.fff]][Z|±hh:mm].
// Values without an offset are read as UTC.
std::optional<TimeSpan> parse_iso8601(std::string_view s);

// True when every instant of `a` precedes every instant of `b`.
inline bool definitely_before(const TimeSpan& a, const TimeSpan& b) { return a.end <= b.begin; }

// Converts a session header such as "1:56 pm on 8 May, 2023" to
// "2023-05-08T13:56:00". ISO-8601 input is returned unchanged.
std::optional<std::string> normalize_header_timestamp(std::string_view s);

// Days since 1970-01-01 for a proleptic Gregorian date.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d);

struct CivilDate {
  std::int64_t year = 1970;
  unsigned month = 1;
  unsigned day = 1;
};

// Inverse of days_from_civil.
CivilDate civil_from_days(std::int64_t days);

// "YYYY-MM-DD" for a day count since the epoch.
std::string format_date(std::int64_t days);

}  // namespace strata
