#include <doctest.h>

#include <cmath>

#include "pvdecay/error.hpp"
#include "pvdecay/percent.hpp"
#include "pvdecay/random.hpp"
#include "pvdecay/stats.hpp"
#include "pvdecay/time.hpp"
#include "support.hpp"

using namespace pvdecay;

TEST_SUITE("time") {
  TEST_CASE("hour of day and arithmetic") {
    const auto h = utc_hour(2008, 1, 1);
    CHECK(h.hour_of_day() == 0);
    CHECK((h + 25).hour_of_day() == 1);
    CHECK((h + 25) - h == 25);
    CHECK(utc_hour(1969, 12, 31, 23).hour_of_day() == 23);
  }

  TEST_CASE("iso dates and hours round trip") {
    const auto h = utc_hour(2010, 2, 28, 17);
    CHECK(format_iso_hour(h) == "2010-02-28T17:00Z");
    CHECK(parse_iso_hour("2010-02-28T17:00Z") == h);
    CHECK(parse_iso_hour("2010-02-28T17Z") == h);
    CHECK(format_iso_date(h) == "2010-02-28");
    CHECK(parse_iso_date("2008-11-04") == utc_hour(2008, 11, 4));
    CHECK(format_compact_date(h) == "20100228");
  }

  TEST_CASE("malformed dates are rejected") {
    CHECK_THROWS_AS(parse_iso_date("2008-02-30"), DataError);
    CHECK_THROWS_AS(parse_iso_date("2008-2-3"), DataError);
    CHECK_THROWS_AS(parse_iso_date(""), DataError);
    CHECK_THROWS_AS(parse_iso_hour("2008-01-01T24:00Z"), DataError);
  }

  TEST_CASE("dump file names") {
    const auto h = utc_hour(2008, 1, 1, 1);
    CHECK(parse_dump_filename("pagecounts-20080101-010000.gz") == h);
    CHECK(parse_dump_filename("pagecounts-20080101-010000") == h);
    CHECK_FALSE(parse_dump_filename("pagecounts-20080101-013000.gz"));
    CHECK_FALSE(parse_dump_filename("projectcounts-20080101-010000"));
    CHECK_FALSE(parse_dump_filename("pagecounts-20080101-010000.bz2"));
    CHECK(dump_filename(h, true) == "pagecounts-20080101-010000.gz");
    CHECK(parse_dump_filename(dump_filename(h + 1000, false)) == h + 1000);
  }
}

TEST_SUITE("percent") {
  TEST_CASE("decoding") {
    CHECK(percent_decode("Augustus%27_reign") == "Augustus'_reign");
    CHECK(percent_decode("a%2fb%2F") == "a/b/");
    CHECK(percent_decode("plain") == "plain");
    CHECK_FALSE(percent_decode("bad%2"));
    CHECK_FALSE(percent_decode("bad%"));
    CHECK_FALSE(percent_decode("bad%zz"));
  }

  TEST_CASE("encoding is canonical and invertible") {
    CHECK(percent_encode("Augustus'_reign") == "Augustus%27_reign");
    CHECK(percent_encode("a b") == "a%20b");
    testing::Gen gen(11);
    for (int i = 0; i < 500; ++i) {
      const auto s = gen.bytes(40);
      const auto encoded = percent_encode(s);
      CHECK(encoded.find(' ') == std::string::npos);
      CHECK(percent_decode(encoded) == s);
    }
  }
}

TEST_SUITE("stats") {
  TEST_CASE("line fit on exact data") {
    std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
    const auto f = stats::fit_line(x, y);
    CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(f.intercept == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(f.r_squared == doctest::Approx(1.0));
    CHECK(f(10) == doctest::Approx(21.0));
  }

  TEST_CASE("degenerate inputs") {
    std::vector<double> one{1.0};
    CHECK_THROWS_AS(stats::fit_line(one, one), NumericalError);
    std::vector<double> same{2, 2, 2}, y{1, 2, 3};
    CHECK_THROWS_AS(stats::fit_line(same, y), NumericalError);
    CHECK_THROWS_AS(stats::pearson(y, same), NumericalError);
  }

  TEST_CASE("moments and quantiles") {
    std::vector<double> v{1, 2, 3, 4};
    CHECK(stats::mean(v) == 2.5);
    CHECK(stats::sample_sd(v) == doctest::Approx(std::sqrt(5.0 / 3.0)));
    CHECK(stats::quantile(v, 0.5) == 2.5);
    CHECK(stats::quantile(v, 0.0) == 1.0);
    CHECK(stats::quantile(v, 1.0) == 4.0);
    CHECK(stats::quantile({1, 2, 3, 4, 5}, 0.25) == 2.0);
    std::vector<double> a{1, 2, 3}, b{3, 2, 1};
    CHECK(stats::pearson(a, b) == doctest::Approx(-1.0));
  }
}

TEST_SUITE("random") {
  TEST_CASE("xoshiro256** reference output") {
    // First outputs for the state produced by SplitMix64 from seed 0.
    std::uint64_t sm = 0;
    const std::uint64_t s0 = splitmix64(sm);
    CHECK(s0 == 0xe220a8397b1dcdafULL);
    Xoshiro256 a(7), b(7), c(8);
    for (int i = 0; i < 10; ++i) {
      const auto x = a();
      CHECK(x == b());
      (void)c();
    }
    CHECK(a() != c());
  }

  TEST_CASE("streams are distinct and reproducible") {
    auto a = Xoshiro256::for_stream(1, 2, 3);
    auto b = Xoshiro256::for_stream(1, 2, 3);
    auto c = Xoshiro256::for_stream(1, 2, 4);
    auto d = Xoshiro256::for_stream(1, 3, 3);
    const auto x = a();
    CHECK(x == b());
    CHECK(x != c());
    CHECK(x != d());
  }

  TEST_CASE("distribution draws have the right moments") {
    auto rng = Xoshiro256::for_stream(5, 0, 0);
    const int n = 20000;
    double sum = 0, sq = 0, pois = 0, bin = 0;
    for (int i = 0; i < n; ++i) {
      const double z = draw_normal(rng, 1.0, 2.0);
      sum += z;
      sq += z * z;
      pois += static_cast<double>(draw_poisson(rng, 30.0));
      bin += static_cast<double>(draw_binomial(rng, 50, 0.3));
    }
    const double mean = sum / n;
    CHECK(std::abs(mean - 1.0) < 4 * 2.0 / std::sqrt(n));
    CHECK(std::abs(std::sqrt(sq / n - mean * mean) - 2.0) < 0.05);
    CHECK(std::abs(pois / n - 30.0) < 4 * std::sqrt(30.0 / n));
    CHECK(std::abs(bin / n - 15.0) < 4 * std::sqrt(10.5 / n));
    CHECK(draw_poisson(rng, 0.0) == 0);
    CHECK(draw_binomial(rng, 9, 0.0) == 0);
    CHECK(draw_binomial(rng, 9, 1.0) == 9);
  }
}
