#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pvdecay/time.hpp"

namespace pvdecay {

/// 1 day on the front page plus 3 days under "recently featured".
inline constexpr int kExposureHours = 96;
/// Model curves and fit objectives cover redistributed hours 1..95.
inline constexpr int kFitHorizon = 95;
/// First redistributed hour after demotion from the front page.
inline constexpr int kDemotionHour = 25;

using Count = std::int64_t;
using CountSlot = std::optional<Count>;

/// Per-title view counts on a contiguous run of UTC hours; an empty slot
/// means no data for that hour.
struct HourlySeries {
  std::string title;
  UtcHour start;
  std::vector<CountSlot> counts;

  UtcHour end() const { return start + static_cast<std::int64_t>(counts.size()); }
  std::size_t present() const;

  friend bool operator==(const HourlySeries&, const HourlySeries&) = default;
};

/// The 96-hour exposure window of one promoted article.
struct ArticleExposure {
  std::string title;
  UtcHour promoted_at;
  std::vector<CountSlot> views = std::vector<CountSlot>(kExposureHours);
  /// Redistributed-time counterpart, filled by circadian::redistribute callers.
  std::optional<std::vector<double>> v_star;

  bool complete() const;
  /// Views in exposure hour t (1-based). Throws DataError if the slot is missing.
  Count v(int t) const;
  /// All 96 slots as doubles. Throws DataError if incomplete.
  std::vector<double> as_doubles() const;
};

HourlySeries to_series(const ArticleExposure& exposure);
/// Throws DataError unless the series has exactly 96 slots starting at 00h.
ArticleExposure to_exposure(const HourlySeries& series);

// Cached series files (".pvs"), version 1. Line oriented text:
//
//   PVSERIES 1
//   title <percent-encoded title>
//   start <YYYY-MM-DDTHH:00Z>
//   length <slot count>
//   mask <one 0/1 per slot>
//   counts <space separated counts, '-' for a missing slot>
//
// The mask and the '-' markers must agree; readers reject anything else.
inline constexpr const char* kSeriesMagic = "PVSERIES";
inline constexpr int kSeriesVersion = 1;

std::string serialize_series(const HourlySeries& series);
HourlySeries parse_series(std::string_view text);
void write_series_file(const std::filesystem::path& path, const HourlySeries& series);
HourlySeries read_series_file(const std::filesystem::path& path);

/// `YYYYMMDD_<encoded title>.pvs`
std::string exposure_filename(const ArticleExposure& exposure);
/// Writes one file per exposure into `dir` (created if absent).
void save_exposures(const std::filesystem::path& dir,
                    const std::vector<ArticleExposure>& exposures);
/// Reads every `.pvs` file in `dir`, ordered by promotion time then title.
std::vector<ArticleExposure> load_exposures(const std::filesystem::path& dir);

}  // namespace pvdecay
