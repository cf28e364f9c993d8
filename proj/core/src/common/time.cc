#include "strata/common/time.h"

#include <array>
#include <cctype>
#include <cstdio>

#include "strata/common/text.h"

namespace strata {
namespace {

bool read_digits(std::string_view s, std::size_t& pos, std::size_t count, int& out) {
  if (pos + count > s.size()) return false;
  int value = 0;
  for (std::size_t i = 0; i < count; ++i) {
    char c = s[pos + i];
    if (c < '0' || c > '9') return false;
    value = value * 10 + (c - '0');
  }
  pos += count;
  out = value;
  return true;
}

bool leap(std::int64_t y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

unsigned days_in_month(std::int64_t y, unsigned m) {
  static constexpr std::array<unsigned, 12> kDays{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && leap(y) ? 29 : kDays[m - 1];
}

std::int64_t epoch_seconds(std::int64_t y, unsigned mo, unsigned d, int h, int mi, int s) {
  return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + s;
}

}  // namespace

std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

std::optional<TimeSpan> parse_iso8601(std::string_view raw) {
  const std::string trimmed = text::trim(raw);
  std::string_view s = trimmed;
  std::size_t pos = 0;
  int year = 0;
  if (!read_digits(s, pos, 4, year)) return std::nullopt;
  if (pos == s.size()) {
    return TimeSpan{epoch_seconds(year, 1, 1, 0, 0, 0), epoch_seconds(year + 1, 1, 1, 0, 0, 0)};
  }
  int month = 0;
  if (s[pos++] != '-' || !read_digits(s, pos, 2, month) || month < 1 || month > 12) return std::nullopt;
  if (pos == s.size()) {
    const int ny = month == 12 ? year + 1 : year;
    const unsigned nm = month == 12 ? 1 : static_cast<unsigned>(month + 1);
    return TimeSpan{epoch_seconds(year, static_cast<unsigned>(month), 1, 0, 0, 0), epoch_seconds(ny, nm, 1, 0, 0, 0)};
  }
  int day = 0;
  if (s[pos++] != '-' || !read_digits(s, pos, 2, day) || day < 1 ||
      static_cast<unsigned>(day) > days_in_month(year, static_cast<unsigned>(month))) {
    return std::nullopt;
  }
  const std::int64_t day_start = epoch_seconds(year, static_cast<unsigned>(month), static_cast<unsigned>(day), 0, 0, 0);
  if (pos == s.size()) return TimeSpan{day_start, day_start + 86400};

  if (s[pos] != 'T' && s[pos] != 't' && s[pos] != ' ') return std::nullopt;
  ++pos;
  int hour = 0;
  int minute = 0;
  int second = 0;
  if (!read_digits(s, pos, 2, hour) || pos >= s.size() || s[pos++] != ':' || !read_digits(s, pos, 2, minute)) {
    return std::nullopt;
  }
  std::int64_t width = 60;
  if (pos < s.size() && s[pos] == ':') {
    ++pos;
    if (!read_digits(s, pos, 2, second)) return std::nullopt;
    width = 1;
    if (pos < s.size() && (s[pos] == '.' || s[pos] == ',')) {
      ++pos;
      const std::size_t start = pos;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      if (pos == start) return std::nullopt;
    }
  }
  if (hour > 24 || minute > 59 || second > 60 || (hour == 24 && (minute != 0 || second != 0))) return std::nullopt;
  std::int64_t offset = 0;
  if (pos < s.size()) {
    const char sign = s[pos];
    if (sign == 'Z' || sign == 'z') {
      ++pos;
    } else if (sign == '+' || sign == '-') {
      ++pos;
      int oh = 0;
      int om = 0;
      if (!read_digits(s, pos, 2, oh)) return std::nullopt;
      if (pos < s.size() && s[pos] == ':') ++pos;
      if (pos < s.size() && !read_digits(s, pos, 2, om)) return std::nullopt;
      offset = (sign == '+' ? 1 : -1) * (oh * 3600 + om * 60);
    } else {
      return std::nullopt;
    }
  }
  if (pos != s.size()) return std::nullopt;
  const std::int64_t begin = day_start + hour * 3600 + minute * 60 + second - offset;
  return TimeSpan{begin, begin + width};
}

std::optional<std::string> normalize_header_timestamp(std::string_view raw) {
  const std::string s = text::trim(raw);
  if (parse_iso8601(s)) return s;

  // "1:56 pm on 8 May, 2023"
  int hour = 0;
  int minute = 0;
  char meridiem[3] = {};
  int day = 0;
  char month_name[16] = {};
  int year = 0;
  if (std::sscanf(s.c_str(), "%d:%d %2s on %d %15[A-Za-z], %d", &hour, &minute, meridiem, &day, month_name, &year) != 6) {
    return std::nullopt;
  }
  static constexpr std::array<std::string_view, 12> kMonths{"january", "february", "march",     "april",
                                                            "may",     "june",     "july",      "august",
                                                            "september", "october", "november", "december"};
  const std::string month_lower = text::to_lower_ascii(month_name);
  int month = 0;
  for (std::size_t i = 0; i < kMonths.size(); ++i) {
    if (kMonths[i] == month_lower || (month_lower.size() >= 3 && kMonths[i].substr(0, 3) == month_lower)) {
      month = static_cast<int>(i) + 1;
      break;
    }
  }
  const std::string mer = text::to_lower_ascii(meridiem);
  if (month == 0 || hour < 1 || hour > 12 || minute < 0 || minute > 59 || (mer != "am" && mer != "pm")) {
    return std::nullopt;
  }
  if (day < 1 || static_cast<unsigned>(day) > days_in_month(year, static_cast<unsigned>(month))) return std::nullopt;
  hour = hour % 12 + (mer == "pm" ? 12 : 0);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:00", year, month, day, hour, minute);
  return std::string(buf);
}

CivilDate civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  return CivilDate{static_cast<std::int64_t>(yoe) + era * 400 + (m <= 2 ? 1 : 0), m, d};
}

std::string format_date(std::int64_t days) {
  const CivilDate c = civil_from_days(days);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02u", static_cast<long long>(c.year), c.month, c.day);
  return std::string(buf);
}

}  // namespace strata
