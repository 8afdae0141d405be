#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "pvdecay/series.hpp"
#include "pvdecay/time.hpp"

namespace pvdecay::ingest {

/// One line of a pagecounts-raw hour file: `project title views bytes`.
struct PageViewRecord {
  std::string project;
  std::string title;  // percent-decoded
  Count views = 0;
  Count bytes = 0;

  friend bool operator==(const PageViewRecord&, const PageViewRecord&) = default;
};

struct LineError {
  std::size_t line_number = 0;
  std::string message;
};

using ParsedLine = std::variant<PageViewRecord, LineError>;

ParsedLine parse_pagecounts_line(std::string_view line, std::size_t line_number = 0);
/// Canonical form; parse_pagecounts_line inverts it exactly.
std::string format_pagecounts_line(const PageViewRecord& record);

struct TitleFilter {
  std::string project = "en";
  std::unordered_set<std::string> titles;
};

/// Contents of one hour file restricted to a title filter.
struct HourData {
  UtcHour hour;
  /// False when the file could not be opened; the whole hour is missing.
  bool readable = false;
  /// False when reading stopped early (e.g. truncated gzip stream). Titles
  /// absent from an incomplete file are treated as missing, not as zero.
  bool complete = false;
  std::unordered_map<std::string, Count> views;
  std::size_t lines = 0;
  std::size_t bad_lines = 0;
  std::vector<LineError> errors;  // first few only

  /// Views for `title`: the summed count, 0 if absent from a complete file,
  /// nullopt if absent from an unreadable or incomplete one.
  CountSlot lookup(const std::string& title) const;
};

inline constexpr std::size_t kMaxStoredLineErrors = 16;

/// Reads a plain or gzip-compressed hour file. Duplicate lines for a title
/// are summed. Never throws for I/O problems; see HourData flags.
HourData load_hour_file(const std::filesystem::path& path, const TitleFilter& filter,
                        UtcHour hour = {});

struct ScheduleEntry {
  UtcHour date;  // 00h UTC
  std::string title;
  bool excluded = false;
};

/// Ordered promotion list. Non-excluded entries have strictly increasing
/// dates (one per day); excluded rows may share a date with others.
struct PromotionSchedule {
  std::vector<ScheduleEntry> entries;
  std::set<std::string> exclusions;

  bool is_excluded(const std::string& title) const { return exclusions.contains(title); }
};

/// CSV rows `date,title[,excluded]`; an optional header row starting with
/// `date` is skipped. Titles may be double-quoted. Throws DataError.
PromotionSchedule parse_schedule(std::string_view csv);
PromotionSchedule read_schedule(const std::filesystem::path& path);
std::string format_schedule(const PromotionSchedule& schedule);

/// Builds the 96-hour window for `entry`. `hours[i]` covers promotion hour
/// i; a null pointer marks a missing hour file.
ArticleExposure build_exposure(const ScheduleEntry& entry, std::span<const HourData* const> hours);

/// Keeps complete exposures whose titles are not excluded.
std::vector<ArticleExposure> filter_complete(std::vector<ArticleExposure> exposures,
                                             const std::set<std::string>& exclusions = {});

/// Hour files found in a dump directory, keyed by the hour in their name.
std::map<UtcHour, std::filesystem::path> scan_dump_dir(const std::filesystem::path& dir);

struct IngestOptions {
  std::filesystem::path dumps_dir;
  std::filesystem::path schedule_path;
  std::optional<UtcHour> from;  // inclusive, by promotion date
  std::optional<UtcHour> to;    // inclusive, by promotion date
  std::string project = "en";
  std::string front_page_title = "Main_Page";
  unsigned threads = 1;
};

struct IngestStats {
  std::size_t hours_needed = 0;
  std::size_t hours_missing = 0;
  std::size_t hours_incomplete = 0;
  std::size_t lines = 0;
  std::size_t bad_lines = 0;
  std::size_t exposures_complete = 0;
  std::size_t exposures_incomplete = 0;
  std::size_t excluded = 0;
  std::vector<LineError> sample_errors;
};

struct IngestResult {
  /// Every non-excluded schedule entry in range, complete or not.
  std::vector<ArticleExposure> exposures;
  /// Front-page counts from the first promotion hour to the end of the last
  /// exposure window.
  HourlySeries front_page;
  IngestStats stats;
};

IngestResult run_ingest(const IngestOptions& options);

}  // namespace pvdecay::ingest
