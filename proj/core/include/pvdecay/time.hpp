#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace pvdecay {

inline constexpr int kHoursPerDay = 24;

/// Absolute UTC hour counted from 1970-01-01T00:00Z.
struct UtcHour {
  std::int64_t index = 0;

  constexpr int hour_of_day() const {
    const auto r = static_cast<int>(index % kHoursPerDay);
    return r < 0 ? r + kHoursPerDay : r;
  }
  constexpr UtcHour operator+(std::int64_t hours) const { return {index + hours}; }
  constexpr UtcHour operator-(std::int64_t hours) const { return {index - hours}; }
  constexpr std::int64_t operator-(UtcHour other) const { return index - other.index; }

  friend constexpr auto operator<=>(const UtcHour&, const UtcHour&) = default;
};

UtcHour utc_hour(int year, unsigned month, unsigned day, int hour = 0);

/// "YYYY-MM-DD", interpreted as 00h UTC. Throws DataError.
UtcHour parse_iso_date(std::string_view text);
/// "YYYY-MM-DDTHH:00Z" or "YYYY-MM-DDTHHZ". Throws DataError.
UtcHour parse_iso_hour(std::string_view text);

std::string format_iso_date(UtcHour hour);
std::string format_iso_hour(UtcHour hour);
/// Compact "YYYYMMDD", used in file names.
std::string format_compact_date(UtcHour hour);

/// Hour-file names follow `pagecounts-YYYYMMDD-HHMMSS` with an optional `.gz`.
/// Minutes and seconds must be zero.
std::optional<UtcHour> parse_dump_filename(std::string_view name);
std::string dump_filename(UtcHour hour, bool gzip);

}  // namespace pvdecay
