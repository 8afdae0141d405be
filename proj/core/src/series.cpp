#include "pvdecay/series.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "pvdecay/error.hpp"
#include "pvdecay/percent.hpp"

namespace pvdecay {
namespace fs = std::filesystem;

namespace {

std::string_view expect_field(std::string_view line, std::string_view key) {
  if (!line.starts_with(key) || line.size() < key.size() + 1 || line[key.size()] != ' ') {
    if (line == key) return {};
    throw DataError("series file: expected '" + std::string(key) + "' line");
  }
  return line.substr(key.size() + 1);
}

Count parse_count(std::string_view token) {
  Count value = 0;
  const auto* last = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), last, value);
  if (ec != std::errc{} || ptr != last || value < 0) {
    throw DataError("series file: bad count '" + std::string(token) + "'");
  }
  return value;
}

}  // namespace

std::size_t HourlySeries::present() const {
  return static_cast<std::size_t>(
      std::count_if(counts.begin(), counts.end(), [](const CountSlot& s) { return s.has_value(); }));
}

bool ArticleExposure::complete() const {
  return views.size() == static_cast<std::size_t>(kExposureHours) &&
         std::all_of(views.begin(), views.end(), [](const CountSlot& s) { return s.has_value(); });
}

Count ArticleExposure::v(int t) const {
  if (t < 1 || t > static_cast<int>(views.size())) {
    throw DataError("exposure hour " + std::to_string(t) + " out of range");
  }
  const auto& slot = views[static_cast<std::size_t>(t - 1)];
  if (!slot) throw DataError("'" + title + "' has no data for exposure hour " + std::to_string(t));
  return *slot;
}

std::vector<double> ArticleExposure::as_doubles() const {
  if (!complete()) throw DataError("exposure '" + title + "' is incomplete");
  std::vector<double> out(views.size());
  std::transform(views.begin(), views.end(), out.begin(),
                 [](const CountSlot& s) { return static_cast<double>(*s); });
  return out;
}

HourlySeries to_series(const ArticleExposure& exposure) {
  return {exposure.title, exposure.promoted_at, exposure.views};
}

ArticleExposure to_exposure(const HourlySeries& series) {
  if (series.counts.size() != static_cast<std::size_t>(kExposureHours)) {
    throw DataError("series '" + series.title + "' has " + std::to_string(series.counts.size()) +
                    " slots, an exposure needs " + std::to_string(kExposureHours));
  }
  if (series.start.hour_of_day() != 0) {
    throw DataError("exposure '" + series.title + "' does not start at 00h UTC");
  }
  ArticleExposure e;
  e.title = series.title;
  e.promoted_at = series.start;
  e.views = series.counts;
  return e;
}

std::string serialize_series(const HourlySeries& series) {
  std::string out;
  out.reserve(64 + series.counts.size() * 8);
  out += kSeriesMagic;
  out += ' ' + std::to_string(kSeriesVersion) + '\n';
  out += "title " + percent_encode(series.title) + '\n';
  out += "start " + format_iso_hour(series.start) + '\n';
  out += "length " + std::to_string(series.counts.size()) + '\n';
  out += "mask ";
  for (const auto& s : series.counts) out += s ? '1' : '0';
  out += "\ncounts";
  for (const auto& s : series.counts) {
    out += ' ';
    out += s ? std::to_string(*s) : std::string("-");
  }
  out += '\n';
  return out;
}

HourlySeries parse_series(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    lines.push_back(text.substr(0, nl));
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  if (lines.size() < 6) throw DataError("series file: truncated");

  const std::string expected_magic =
      std::string(kSeriesMagic) + ' ' + std::to_string(kSeriesVersion);
  if (lines[0] != expected_magic) {
    throw DataError("series file: unsupported header '" + std::string(lines[0]) + "' (want '" +
                    expected_magic + "')");
  }

  HourlySeries series;
  const auto title = percent_decode(expect_field(lines[1], "title"));
  if (!title || title->empty()) throw DataError("series file: bad title");
  series.title = *title;
  series.start = parse_iso_hour(expect_field(lines[2], "start"));
  const Count length = parse_count(expect_field(lines[3], "length"));
  const auto mask = expect_field(lines[4], "mask");
  if (mask.size() != static_cast<std::size_t>(length)) {
    throw DataError("series file: mask length does not match length field");
  }

  std::string_view counts = expect_field(lines[5], "counts");
  series.counts.reserve(static_cast<std::size_t>(length));
  while (!counts.empty()) {
    const auto sp = counts.find(' ');
    const auto token = counts.substr(0, sp);
    if (token == "-") {
      series.counts.emplace_back(std::nullopt);
    } else {
      series.counts.emplace_back(parse_count(token));
    }
    if (sp == std::string_view::npos) break;
    counts.remove_prefix(sp + 1);
  }
  if (series.counts.size() != static_cast<std::size_t>(length)) {
    throw DataError("series file: expected " + std::to_string(length) + " counts, found " +
                    std::to_string(series.counts.size()));
  }
  for (std::size_t i = 0; i < series.counts.size(); ++i) {
    const char bit = mask[i];
    if ((bit != '0' && bit != '1') || (bit == '1') != series.counts[i].has_value()) {
      throw DataError("series file: mask disagrees with counts at slot " + std::to_string(i));
    }
  }
  return series;
}

void write_series_file(const fs::path& path, const HourlySeries& series) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << serialize_series(series);
  if (!out) throw DataError("write failed: " + path.string());
}

HourlySeries read_series_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_series(buf.str());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string exposure_filename(const ArticleExposure& exposure) {
  return format_compact_date(exposure.promoted_at) + "_" + percent_encode(exposure.title) + ".pvs";
}

void save_exposures(const fs::path& dir, const std::vector<ArticleExposure>& exposures) {
  fs::create_directories(dir);
  for (const auto& e : exposures) write_series_file(dir / exposure_filename(e), to_series(e));
}

std::vector<ArticleExposure> load_exposures(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pvs") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<ArticleExposure> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back(to_exposure(read_series_file(f)));
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.promoted_at != b.promoted_at ? a.promoted_at < b.promoted_at : a.title < b.title;
  });
  return out;
}

}  // namespace pvdecay
