#include <doctest.h>

#include <zlib.h>

#include <algorithm>
#include <fstream>

#include "pvdecay/error.hpp"
#include "pvdecay/ingest.hpp"
#include "pvdecay/percent.hpp"
#include "support.hpp"

using namespace pvdecay;
using namespace pvdecay::ingest;
namespace fs = std::filesystem;

namespace {

PageViewRecord record(std::string_view line) {
  auto parsed = parse_pagecounts_line(line, 1);
  REQUIRE(std::holds_alternative<PageViewRecord>(parsed));
  return std::get<PageViewRecord>(parsed);
}

LineError line_error(std::string_view line, std::size_t number) {
  auto parsed = parse_pagecounts_line(line, number);
  REQUIRE(std::holds_alternative<LineError>(parsed));
  return std::get<LineError>(parsed);
}

void write_plain(const fs::path& path, const std::string& body) {
  std::ofstream(path, std::ios::binary) << body;
}

void write_gzip(const fs::path& path, const std::string& body) {
  gzFile f = gzopen(path.c_str(), "wb");
  REQUIRE(f != nullptr);
  REQUIRE(gzwrite(f, body.data(), static_cast<unsigned>(body.size())) == static_cast<int>(body.size()));
  REQUIRE(gzclose(f) == Z_OK);
}

TitleFilter filter_of(std::initializer_list<std::string> titles) {
  TitleFilter f;
  f.titles.insert(titles.begin(), titles.end());
  return f;
}

HourData complete_hour(UtcHour hour, std::unordered_map<std::string, Count> views) {
  HourData d;
  d.hour = hour;
  d.readable = true;
  d.complete = true;
  d.views = std::move(views);
  return d;
}

}  // namespace

TEST_SUITE("ingest") {
  TEST_CASE("parse_pagecounts_line maps fields positionally") {
    CHECK(record("en Main_Page 242332 4737756") == PageViewRecord{"en", "Main_Page", 242332, 4737756});
    CHECK(record("en X 0 0") == PageViewRecord{"en", "X", 0, 0});
    CHECK(record("en Augustus%27_reign 5 100").title == "Augustus'_reign");
    CHECK(record("en Windows_line 1 2\r").views == 1);
  }

  TEST_CASE("malformed lines carry their line number") {
    CHECK(line_error("en Main_Page 12", 7).line_number == 7);
    CHECK(line_error("en Main_Page 1 2 3", 8).line_number == 8);
    CHECK(line_error("en Main_Page x 2", 9).line_number == 9);
    line_error("en Main_Page -1 2", 1);
    line_error("en Main_Page 1 2.5", 1);
    line_error("en Bad%zzTitle 1 2", 1);
    line_error("en  Main_Page 1 2", 1);
    line_error("", 1);
  }

  TEST_CASE("canonical lines survive parse and format") {
    testing::Gen gen(21);
    for (int i = 0; i < 300; ++i) {
      PageViewRecord r{gen.coin() ? "en" : "de.b", gen.bytes(30), gen.integer(0, 1'000'000'000),
                       gen.integer(0, 1'000'000'000'000)};
      const auto line = format_pagecounts_line(r);
      CHECK(record(line) == r);
      CHECK(format_pagecounts_line(record(line)) == line);
    }
  }

  TEST_CASE("load_hour_file sums duplicate lines") {
    testing::TempDir dir;
    write_plain(dir / "h", "en A 3 0\nen A 4 0\n");
    const auto data = load_hour_file(dir / "h", filter_of({"A"}));
    CHECK(data.readable);
    CHECK(data.complete);
    CHECK(data.views.size() == 1);
    CHECK(data.views.at("A") == 7);
  }

  TEST_CASE("load_hour_file with unmatched or empty filters") {
    testing::TempDir dir;
    write_plain(dir / "h", "en A 3 0\nen A 4 0\n");
    const auto b = load_hour_file(dir / "h", filter_of({"B"}));
    CHECK(b.views.empty());
    CHECK(b.lookup("B") == Count{0});
    CHECK(load_hour_file(dir / "h", TitleFilter{}).views.empty());
  }

  TEST_CASE("load_hour_file filters by project and tallies bad lines") {
    testing::TempDir dir;
    write_plain(dir / "h", "de A 100 0\nen A 2 0\nen A\nen A 1 1\nnot a line at all\nen A 3 9");
    const auto d = load_hour_file(dir / "h", filter_of({"A"}));
    CHECK(d.views.at("A") == 6);
    CHECK(d.bad_lines == 2);
    REQUIRE(d.errors.size() == 2);
    CHECK(d.errors[0].line_number == 3);
    CHECK(d.errors[1].line_number == 5);
  }

  TEST_CASE("gzip, truncated and missing hour files") {
    testing::TempDir dir;
    std::string body;
    for (int i = 0; i < 5000; ++i) body += "en Filler_" + std::to_string(i) + " 1 1\n";
    body += "en A 9 9\n";
    write_gzip(dir / "h.gz", body);
    const auto full = load_hour_file(dir / "h.gz", filter_of({"A", "Z"}));
    CHECK(full.complete);
    CHECK(full.lookup("A") == Count{9});
    CHECK(full.lookup("Z") == Count{0});

    const auto size = fs::file_size(dir / "h.gz");
    fs::copy_file(dir / "h.gz", dir / "cut.gz");
    fs::resize_file(dir / "cut.gz", size / 2);
    const auto cut = load_hour_file(dir / "cut.gz", filter_of({"A"}));
    CHECK(cut.readable);
    CHECK_FALSE(cut.complete);
    CHECK_FALSE(cut.lookup("A").has_value());

    const auto gone = load_hour_file(dir / "absent.gz", filter_of({"A"}));
    CHECK_FALSE(gone.readable);
    CHECK_FALSE(gone.lookup("A").has_value());
  }

  TEST_CASE("permuting duplicate lines never changes the sum") {
    testing::Gen gen(31);
    testing::TempDir dir;
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<std::string> lines;
      Count expected = 0;
      const auto k = gen.integer(1, 12);
      for (int i = 0; i < k; ++i) {
        const auto v = gen.integer(0, 5000);
        expected += v;
        lines.push_back("en T " + std::to_string(v) + " 1\n");
        lines.push_back("en Other_" + std::to_string(i) + " 3 1\n");
      }
      for (int perm = 0; perm < 3; ++perm) {
        for (std::size_t i = lines.size() - 1; i > 0; --i) {
          std::swap(lines[i], lines[static_cast<std::size_t>(gen.integer(0, static_cast<std::int64_t>(i)))]);
        }
        std::string body;
        for (const auto& l : lines) body += l;
        write_plain(dir / "h", body);
        CHECK(load_hour_file(dir / "h", filter_of({"T"})).lookup("T") == expected);
      }
    }
  }

  TEST_CASE("build_exposure") {
    const auto start = utc_hour(2009, 3, 1);
    const ScheduleEntry entry{start, "T", false};
    std::vector<HourData> hours;
    for (int i = 0; i < kExposureHours; ++i) hours.push_back(complete_hour(start + i, {{"T", 100 + i}}));
    std::vector<const HourData*> ptrs;
    for (const auto& h : hours) ptrs.push_back(&h);

    SUBCASE("all hours present") {
      const auto e = build_exposure(entry, ptrs);
      CHECK(e.complete());
      CHECK(e.v(1) == 100);
      CHECK(e.v(96) == 195);
      CHECK(e.promoted_at == start);
    }
    SUBCASE("hour 40 missing") {
      ptrs[39] = nullptr;
      const auto e = build_exposure(entry, ptrs);
      CHECK_FALSE(e.complete());
      CHECK_FALSE(e.views[39].has_value());
      CHECK(e.views[38] == Count{138});
      CHECK_THROWS_AS(e.v(40), DataError);
    }
    SUBCASE("title absent from a present hour") {
      hours[10].views.clear();
      const auto e = build_exposure(entry, ptrs);
      CHECK(e.complete());
      CHECK(e.v(11) == 0);
    }
    SUBCASE("title absent from an incomplete hour") {
      hours[10].views.clear();
      hours[10].complete = false;
      const auto e = build_exposure(entry, ptrs);
      CHECK_FALSE(e.views[10].has_value());
    }
  }

  TEST_CASE("filter_complete") {
    std::vector<ArticleExposure> all(686);
    std::set<std::string> excluded{"Barack_Obama", "John_McCain"};
    for (std::size_t i = 0; i < all.size(); ++i) {
      all[i].title = i == 300 ? "Barack_Obama" : i == 301 ? "John_McCain" : "A" + std::to_string(i);
      for (auto& slot : all[i].views) slot = 1;
    }
    CHECK(filter_complete(all, excluded).size() == 684);
    CHECK(filter_complete({}, excluded).empty());
    all[5].views[17].reset();
    const auto kept = filter_complete(all, excluded);
    CHECK(kept.size() == 683);
    CHECK(std::none_of(kept.begin(), kept.end(), [](const auto& e) { return e.title == "A5"; }));
  }

  TEST_CASE("schedule parsing") {
    const auto s = parse_schedule(
        "date,title,excluded\n"
        "2008-11-03,Alpha,0\n"
        "2008-11-04,Barack_Obama,1\n"
        "2008-11-04,John_McCain,yes\n"
        "2008-11-05,\"Comma, Title\"\n"
        "2008-11-06,\"Quote \"\"Q\"\"\",\r\n");
    REQUIRE(s.entries.size() == 5);
    CHECK(s.entries[0].date == utc_hour(2008, 11, 3));
    CHECK(s.entries[3].title == "Comma, Title");
    CHECK(s.entries[4].title == "Quote \"Q\"");
    CHECK(s.is_excluded("Barack_Obama"));
    CHECK(s.is_excluded("John_McCain"));
    CHECK_FALSE(s.is_excluded("Alpha"));
    CHECK(parse_schedule(format_schedule(s)).entries.size() == 5);
    CHECK(format_schedule(parse_schedule(format_schedule(s))) == format_schedule(s));
  }

  TEST_CASE("schedule errors") {
    CHECK_THROWS_AS(parse_schedule("2008-11-03,A\n2008-11-03,B\n"), DataError);
    CHECK_THROWS_AS(parse_schedule("2008-11-04,A\n2008-11-03,B\n"), DataError);
    CHECK_THROWS_AS(parse_schedule("2008-11-03\n"), DataError);
    CHECK_THROWS_AS(parse_schedule("2008-11-03,A,maybe\n"), DataError);
    CHECK_THROWS_AS(parse_schedule("2008-13-03,A\n"), DataError);
    CHECK_THROWS_AS(parse_schedule("2008-11-03,\"open\n"), DataError);
  }

  TEST_CASE("consecutive windows overlap by 72 hours") {
    testing::Gen gen(41);
    const auto start = utc_hour(2008, 1, 1);
    for (int i = 0; i < 50; ++i) {
      const auto a = start + gen.integer(0, 800) * kHoursPerDay;
      const auto b = a + kHoursPerDay;
      const auto overlap = std::min(a + kExposureHours, b + kExposureHours) - std::max(a, b);
      CHECK(overlap == 72);
    }
  }

  TEST_CASE("scan_dump_dir keys files by hour") {
    testing::TempDir dir;
    const auto h = utc_hour(2008, 1, 1, 5);
    write_plain(dir / dump_filename(h, false), "");
    write_plain(dir / dump_filename(h + 1, true), "");
    write_plain(dir / "README", "");
    const auto files = scan_dump_dir(dir.path());
    CHECK(files.size() == 2);
    CHECK(files.contains(h));
    CHECK(files.contains(h + 1));
  }

  TEST_CASE("run_ingest flags missing hours and sums duplicates") {
    testing::TempDir dir;
    const auto start = utc_hour(2008, 1, 1);
    fs::create_directories(dir / "dumps");
    for (int i = 0; i < kExposureHours + kHoursPerDay; ++i) {
      if (i == 30) continue;
      std::string body = "en Main_Page 1000 1\n";
      if (i < kExposureHours) body += "en First 2 1\nen First 3 1\n";
      if (i >= kHoursPerDay && i != 50) body += "en Second%27s 7 1\n";
      write_plain(dir / "dumps" / dump_filename(start + i, i % 2 == 0), body);
    }
    write_plain(dir / "schedule.csv", "2008-01-01,First\n2008-01-02,Second's\n2008-01-02,Gone,1\n");
    IngestOptions o;
    o.dumps_dir = dir / "dumps";
    o.schedule_path = dir / "schedule.csv";
    o.threads = 3;
    const auto r = run_ingest(o);
    REQUIRE(r.exposures.size() == 2);
    CHECK(r.stats.hours_missing == 1);
    const auto& first = r.exposures[0];
    CHECK_FALSE(first.complete());
    CHECK_FALSE(first.views[30].has_value());
    CHECK(first.views[29] == Count{5});
    const auto& second = r.exposures[1];
    CHECK(second.title == "Second's");
    CHECK_FALSE(second.views[6].has_value());
    CHECK(second.views[26] == Count{0});
    CHECK(second.views[27] == Count{7});
    CHECK(r.front_page.start == start);
    CHECK(r.front_page.counts.size() == static_cast<std::size_t>(kExposureHours + kHoursPerDay));
    CHECK_FALSE(r.front_page.counts[30].has_value());
    CHECK(r.front_page.counts[31] == Count{1000});
  }
}
