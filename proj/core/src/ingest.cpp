#include "pvdecay/ingest.hpp"

#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "pvdecay/error.hpp"
#include "pvdecay/parallel.hpp"
#include "pvdecay/percent.hpp"

namespace pvdecay::ingest {
namespace fs = std::filesystem;

namespace {

bool parse_non_negative(std::string_view token, Count& out) {
  if (token.empty()) return false;
  const auto* last = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), last, out);
  return ec == std::errc{} && ptr == last && out >= 0;
}

LineError line_error(std::size_t n, std::string msg) { return LineError{n, std::move(msg)}; }

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Minimal RFC 4180 field splitter for a single row.
std::vector<std::string> split_csv_row(std::string_view row, std::size_t row_number) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < row.size(); ++i) {
    const char c = row[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < row.size() && row[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && trim(field).empty()) {
      field.clear();
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.push_back(was_quoted ? field : std::string(trim(field)));
      field.clear();
      was_quoted = false;
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw DataError("schedule row " + std::to_string(row_number) + ": unterminated quote");
  fields.push_back(was_quoted ? field : std::string(trim(field)));
  return fields;
}

bool parse_excluded_flag(std::string_view value, std::size_t row_number) {
  const auto v = lower(trim(value));
  if (v.empty() || v == "0" || v == "false" || v == "no") return false;
  if (v == "1" || v == "true" || v == "yes" || v == "excluded") return true;
  throw DataError("schedule row " + std::to_string(row_number) + ": bad excluded flag '" +
                  std::string(value) + "'");
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos && trim(s) == s) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

ParsedLine parse_pagecounts_line(std::string_view line, std::size_t line_number) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

  std::string_view fields[4];
  std::size_t count = 0;
  while (true) {
    const auto sp = line.find(' ');
    const auto token = line.substr(0, sp);
    if (token.empty()) return line_error(line_number, "empty field");
    if (count == 4) return line_error(line_number, "more than 4 fields");
    fields[count++] = token;
    if (sp == std::string_view::npos) break;
    line.remove_prefix(sp + 1);
  }
  if (count != 4) return line_error(line_number, "expected 4 fields, found " + std::to_string(count));

  PageViewRecord rec;
  rec.project = std::string(fields[0]);
  auto title = percent_decode(fields[1]);
  if (!title) return line_error(line_number, "invalid percent-encoding in title");
  if (title->empty()) return line_error(line_number, "empty title");
  rec.title = std::move(*title);
  if (!parse_non_negative(fields[2], rec.views)) return line_error(line_number, "non-numeric view count");
  if (!parse_non_negative(fields[3], rec.bytes)) return line_error(line_number, "non-numeric byte count");
  return rec;
}

std::string format_pagecounts_line(const PageViewRecord& record) {
  return record.project + ' ' + percent_encode(record.title) + ' ' + std::to_string(record.views) +
         ' ' + std::to_string(record.bytes);
}

CountSlot HourData::lookup(const std::string& title) const {
  if (!readable) return std::nullopt;
  if (const auto it = views.find(title); it != views.end()) return it->second;
  if (!complete) return std::nullopt;
  return Count{0};
}

HourData load_hour_file(const fs::path& path, const TitleFilter& filter, UtcHour hour) {
  HourData data;
  data.hour = hour;
  gzFile file = gzopen(path.c_str(), "rb");
  if (file == nullptr) return data;
  data.readable = true;

  auto handle = [&](std::string_view line) {
    ++data.lines;
    if (line.empty() || line == "\r") return;
    auto parsed = parse_pagecounts_line(line, data.lines);
    if (auto* err = std::get_if<LineError>(&parsed)) {
      ++data.bad_lines;
      if (data.errors.size() < kMaxStoredLineErrors) data.errors.push_back(std::move(*err));
      return;
    }
    auto& rec = std::get<PageViewRecord>(parsed);
    if (rec.project != filter.project || !filter.titles.contains(rec.title)) return;
    data.views[rec.title] += rec.views;
  };

  std::string pending;
  char buf[1 << 16];
  while (gzgets(file, buf, sizeof buf) != nullptr) {
    std::string_view chunk(buf);
    if (!chunk.empty() && chunk.back() == '\n') {
      chunk.remove_suffix(1);
      if (pending.empty()) {
        handle(chunk);
      } else {
        pending.append(chunk);
        handle(pending);
        pending.clear();
      }
    } else {
      pending.append(chunk);
    }
  }
  int err = Z_OK;
  gzerror(file, &err);
  data.complete = (err == Z_OK || err == Z_STREAM_END);
  if (data.complete && !pending.empty()) handle(pending);
  gzclose(file);
  return data;
}

PromotionSchedule parse_schedule(std::string_view csv) {
  PromotionSchedule schedule;
  std::size_t row_number = 0;
  std::optional<UtcHour> last_kept;
  std::optional<UtcHour> last_any;
  while (!csv.empty()) {
    const auto nl = csv.find('\n');
    auto row = csv.substr(0, nl);
    csv.remove_prefix(nl == std::string_view::npos ? csv.size() : nl + 1);
    ++row_number;
    if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
    if (trim(row).empty()) continue;

    const auto fields = split_csv_row(row, row_number);
    if (schedule.entries.empty() && !fields.empty() && lower(fields[0]) == "date") continue;
    if (fields.size() < 2 || fields.size() > 3) {
      throw DataError("schedule row " + std::to_string(row_number) + ": expected date,title[,excluded]");
    }
    ScheduleEntry entry;
    try {
      entry.date = parse_iso_date(fields[0]);
    } catch (const DataError& e) {
      throw DataError("schedule row " + std::to_string(row_number) + ": " + e.what());
    }
    entry.title = fields[1];
    if (entry.title.empty()) throw DataError("schedule row " + std::to_string(row_number) + ": empty title");
    entry.excluded = fields.size() == 3 && parse_excluded_flag(fields[2], row_number);

    if (last_any && entry.date < *last_any) {
      throw DataError("schedule row " + std::to_string(row_number) + ": dates out of order");
    }
    last_any = entry.date;
    if (entry.excluded) {
      schedule.exclusions.insert(entry.title);
    } else {
      if (last_kept && entry.date <= *last_kept) {
        throw DataError("schedule row " + std::to_string(row_number) +
                        ": more than one promoted article on " + format_iso_date(entry.date));
      }
      last_kept = entry.date;
    }
    schedule.entries.push_back(std::move(entry));
  }
  return schedule;
}

PromotionSchedule read_schedule(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read schedule " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_schedule(buf.str());
}

std::string format_schedule(const PromotionSchedule& schedule) {
  std::string out = "date,title,excluded\n";
  for (const auto& e : schedule.entries) {
    out += format_iso_date(e.date) + ',' + csv_quote(e.title) + ',' + (e.excluded ? "1" : "0") + '\n';
  }
  return out;
}

ArticleExposure build_exposure(const ScheduleEntry& entry, std::span<const HourData* const> hours) {
  if (hours.size() != static_cast<std::size_t>(kExposureHours)) {
    throw DataError("build_exposure needs " + std::to_string(kExposureHours) + " hours");
  }
  if (entry.date.hour_of_day() != 0) throw DataError("promotion '" + entry.title + "' not at 00h UTC");
  ArticleExposure e;
  e.title = entry.title;
  e.promoted_at = entry.date;
  for (std::size_t i = 0; i < hours.size(); ++i) {
    e.views[i] = hours[i] ? hours[i]->lookup(entry.title) : std::nullopt;
  }
  return e;
}

std::vector<ArticleExposure> filter_complete(std::vector<ArticleExposure> exposures,
                                             const std::set<std::string>& exclusions) {
  std::erase_if(exposures, [&](const ArticleExposure& e) {
    return !e.complete() || exclusions.contains(e.title);
  });
  return exposures;
}

std::map<UtcHour, fs::path> scan_dump_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError("dump directory not found: " + dir.string());
  std::map<UtcHour, fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    const auto hour = parse_dump_filename(name);
    if (!hour) continue;
    auto [it, inserted] = out.emplace(*hour, entry.path());
    if (!inserted) {
      // Prefer the lexicographically smallest name so the choice is stable.
      if (entry.path().filename() < it->second.filename()) it->second = entry.path();
    }
  }
  return out;
}

IngestResult run_ingest(const IngestOptions& options) {
  const auto schedule = read_schedule(options.schedule_path);
  const auto files = scan_dump_dir(options.dumps_dir);

  IngestResult result;
  std::vector<const ScheduleEntry*> selected;
  for (const auto& entry : schedule.entries) {
    if (options.from && entry.date < *options.from) continue;
    if (options.to && entry.date > *options.to) continue;
    if (entry.excluded || schedule.is_excluded(entry.title)) {
      ++result.stats.excluded;
      continue;
    }
    selected.push_back(&entry);
  }
  result.front_page.title = options.front_page_title;
  if (selected.empty()) return result;

  const UtcHour first = selected.front()->date;
  const UtcHour end = selected.back()->date + kExposureHours;
  const auto n_hours = static_cast<std::size_t>(end - first);

  TitleFilter filter;
  filter.project = options.project;
  filter.titles.insert(options.front_page_title);
  for (const auto* e : selected) filter.titles.insert(e->title);

  std::vector<HourData> hours(n_hours);
  parallel_for(n_hours, options.threads, [&](std::size_t i) {
    const UtcHour h = first + static_cast<std::int64_t>(i);
    if (const auto it = files.find(h); it != files.end()) {
      hours[i] = load_hour_file(it->second, filter, h);
    } else {
      hours[i].hour = h;
    }
  });

  auto& stats = result.stats;
  stats.hours_needed = n_hours;
  result.front_page.start = first;
  result.front_page.counts.reserve(n_hours);
  for (const auto& h : hours) {
    if (!h.readable) ++stats.hours_missing;
    else if (!h.complete) ++stats.hours_incomplete;
    stats.lines += h.lines;
    stats.bad_lines += h.bad_lines;
    for (const auto& err : h.errors) {
      if (stats.sample_errors.size() < kMaxStoredLineErrors) {
        stats.sample_errors.push_back(
            {err.line_number, dump_filename(h.hour, false) + ": " + err.message});
      }
    }
    result.front_page.counts.push_back(h.lookup(options.front_page_title));
  }

  std::vector<const HourData*> window(kExposureHours);
  for (const auto* entry : selected) {
    const auto offset = static_cast<std::size_t>(entry->date - first);
    for (std::size_t i = 0; i < window.size(); ++i) window[i] = &hours[offset + i];
    auto exposure = build_exposure(*entry, window);
    (exposure.complete() ? stats.exposures_complete : stats.exposures_incomplete) += 1;
    result.exposures.push_back(std::move(exposure));
  }
  return result;
}

}  // namespace pvdecay::ingest
