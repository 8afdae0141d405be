#include "pvdecay/time.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

#include "pvdecay/error.hpp"

namespace pvdecay {
namespace {

namespace chr = std::chrono;

bool parse_fixed(std::string_view text, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > text.size()) return false;
  const char* first = text.data() + pos;
  const char* last = first + len;
  for (const char* p = first; p != last; ++p) {
    if (*p < '0' || *p > '9') return false;
  }
  return std::from_chars(first, last, out).ptr == last;
}

chr::year_month_day civil(UtcHour hour) {
  std::int64_t days = hour.index / kHoursPerDay;
  if (hour.index % kHoursPerDay < 0) --days;
  return chr::year_month_day{chr::sys_days{chr::days{days}}};
}

}  // namespace

UtcHour utc_hour(int year, unsigned month, unsigned day, int hour) {
  const chr::year_month_day ymd{chr::year{year}, chr::month{month}, chr::day{day}};
  if (!ymd.ok() || hour < 0 || hour >= kHoursPerDay) {
    throw DataError("invalid calendar date " + std::to_string(year) + "-" +
                    std::to_string(month) + "-" + std::to_string(day));
  }
  const auto days = chr::sys_days{ymd}.time_since_epoch().count();
  return {static_cast<std::int64_t>(days) * kHoursPerDay + hour};
}

UtcHour parse_iso_date(std::string_view text) {
  int y = 0, m = 0, d = 0;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !parse_fixed(text, 0, 4, y) ||
      !parse_fixed(text, 5, 2, m) || !parse_fixed(text, 8, 2, d)) {
    throw DataError("expected ISO date YYYY-MM-DD, got '" + std::string(text) + "'");
  }
  return utc_hour(y, static_cast<unsigned>(m), static_cast<unsigned>(d), 0);
}

UtcHour parse_iso_hour(std::string_view text) {
  int h = 0;
  const bool ok = text.size() >= 14 && text[10] == 'T' && parse_fixed(text, 11, 2, h) &&
                  (text.substr(13) == "Z" || text.substr(13) == ":00Z");
  if (!ok) throw DataError("expected ISO hour YYYY-MM-DDTHH:00Z, got '" + std::string(text) + "'");
  const UtcHour day = parse_iso_date(text.substr(0, 10));
  if (h >= kHoursPerDay) throw DataError("hour out of range in '" + std::string(text) + "'");
  return day + h;
}

std::string format_iso_date(UtcHour hour) {
  const auto ymd = civil(hour);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::string format_iso_hour(UtcHour hour) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "T%02d:00Z", hour.hour_of_day());
  return format_iso_date(hour) + buf;
}

std::string format_compact_date(UtcHour hour) {
  const auto ymd = civil(hour);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d%02u%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::optional<UtcHour> parse_dump_filename(std::string_view name) {
  constexpr std::string_view prefix = "pagecounts-";
  if (name.ends_with(".gz")) name.remove_suffix(3);
  if (!name.starts_with(prefix)) return std::nullopt;
  name.remove_prefix(prefix.size());
  // YYYYMMDD-HHMMSS
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (name.size() != 15 || name[8] != '-' || !parse_fixed(name, 0, 4, y) ||
      !parse_fixed(name, 4, 2, mo) || !parse_fixed(name, 6, 2, d) ||
      !parse_fixed(name, 9, 2, h) || !parse_fixed(name, 11, 2, mi) ||
      !parse_fixed(name, 13, 2, s)) {
    return std::nullopt;
  }
  if (mi != 0 || s != 0 || h >= kHoursPerDay) return std::nullopt;
  const chr::year_month_day ymd{chr::year{y}, chr::month{static_cast<unsigned>(mo)},
                                chr::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return utc_hour(y, static_cast<unsigned>(mo), static_cast<unsigned>(d), h);
}

std::string dump_filename(UtcHour hour, bool gzip) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "-%02d0000", hour.hour_of_day());
  return "pagecounts-" + format_compact_date(hour) + buf + (gzip ? ".gz" : "");
}

}  // namespace pvdecay
