#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <sstream>

#include "pvdecay/artifacts.hpp"
#include "pvdecay_cli/cli.hpp"
#include "support.hpp"

using namespace pvdecay;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json error_of(const Outcome& o) {
  const auto j = nlohmann::json::parse(o.err);
  REQUIRE(j.contains("error"));
  return j["error"];
}

std::size_t csv_rows(const fs::path& path) {
  const auto text = artifacts::read_text_file(path);
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("help exits zero") {
    const auto o = run_cli({"--help"});
    CHECK(o.code == 0);
    CHECK(o.out.find("simulate") != std::string::npos);
    CHECK(run_cli({"fit", "--help"}).code == 0);
  }

  TEST_CASE("usage errors exit one with a JSON summary") {
    auto o = run_cli({"fit", "--bogus"});
    CHECK(o.code == 1);
    CHECK(error_of(o)["kind"] == "usage");
    CHECK(run_cli({}).code == 1);
    CHECK(run_cli({"teleport"}).code == 1);
    CHECK(run_cli({"predict", "--params", "p.json", "--map", "m.json"}).code == 1);
    CHECK(run_cli({"--threads", "0", "simulate"}).code == 1);
  }

  TEST_CASE("missing files exit two") {
    testing::TempDir dir;
    const auto o = run_cli({"fit", "--exposures", (dir / "nope").string(), "--map", (dir / "m.json").string(),
                            "--out", (dir / "p.json").string()});
    CHECK(o.code == 2);
    CHECK(error_of(o)["kind"] == "data");
    CHECK(error_of(o)["exit_code"] == 2);
  }

  TEST_CASE("schema mismatch exits two") {
    testing::TempDir dir;
    const auto sim = dir / "sim";
    REQUIRE(run_cli({"simulate", "--n-articles", "3", "--out", sim.string()}).code == 0);
    const auto o = run_cli({"predict", "--params", (sim / "truth_map.json").string(), "--map",
                            (sim / "truth_map.json").string(), "--v1", "100", "--out", (dir / "p.csv").string()});
    CHECK(o.code == 2);
    CHECK(std::string(error_of(o)["message"]).find("schema") != std::string::npos);
  }

  TEST_CASE("numerical failures exit three") {
    testing::TempDir dir;
    std::vector<double> mean(96, 10.0);
    mean[5] = 0.0;
    artifacts::write_text_file(dir / "mean.csv", artifacts::mean_series_to_csv(mean));
    circadian::HourProfile flat{};
    flat.fill(5.0);
    artifacts::write_text_file(dir / "profile.json",
                               artifacts::profile_to_json(circadian::CircadianProfile::make(flat)));
    const auto o = run_cli({"decycle", "--profile", (dir / "profile.json").string(), "--mean-series",
                            (dir / "mean.csv").string(), "--out", (dir / "map.json").string()});
    CHECK(o.code == 3);
    CHECK(error_of(o)["kind"] == "numerical");
  }

  TEST_CASE("simulate, fit and evaluate on defaults") {
    testing::TempDir dir;
    const auto d = dir.path().string();
    REQUIRE(run_cli({"simulate", "--out", d}).code == 0);
    REQUIRE(run_cli({"decycle", "--profile", d + "/profile.json", "--exposures", d + "/exposures", "--out",
                     d + "/map.json"})
                .code == 0);
    REQUIRE(run_cli({"fit", "--exposures", d + "/exposures", "--map", d + "/map.json", "--out", d + "/params.json"})
                .code == 0);
    const auto o = run_cli({"evaluate", "--params", d + "/params.json", "--map", d + "/map.json", "--exposures",
                            d + "/exposures", "--out", d + "/report.csv"});
    REQUIRE(o.code == 0);
    const auto summary = nlohmann::json::parse(o.out);
    CHECK(summary["articles"] == 200);
    CHECK(csv_rows(dir / "report.csv") == 1 + 2 * 96);
    CHECK(fs::exists(dir / "report.csv.meta.json"));
    const auto params = artifacts::params_from_json(artifacts::read_text_file(dir / "params.json"));
    CHECK(std::abs(params.params.beta() - 0.9874) < 0.003);
  }

  TEST_CASE("train on the first 100 and test on the rest") {
    testing::TempDir dir;
    const auto d = dir.path().string();
    REQUIRE(run_cli({"simulate", "--n-articles", "684", "--out", d, "--threads", "2"}).code == 0);
    REQUIRE(run_cli({"profile", "--series", d + "/front_page.pvs", "--out", d + "/fp.json"}).code == 0);
    REQUIRE(run_cli({"decycle", "--profile", d + "/fp.json", "--exposures", d + "/exposures", "--first-n", "100",
                     "--out", d + "/map.json"})
                .code == 0);
    REQUIRE(run_cli({"fit", "--exposures", d + "/exposures", "--map", d + "/map.json", "--first-n", "100", "--out",
                     d + "/params.json"})
                .code == 0);
    const auto held_out = run_cli({"evaluate", "--params", d + "/params.json", "--map", d + "/map.json",
                                   "--exposures", d + "/exposures", "--out", d + "/report.csv"});
    REQUIRE(held_out.code == 0);
    const auto a = nlohmann::json::parse(held_out.out);
    CHECK(a["articles"] == 584);
    CHECK(a["skipped_first"] == 100);
    const auto in_sample = run_cli({"evaluate", "--params", d + "/params.json", "--map", d + "/map.json",
                                    "--exposures", d + "/exposures", "--in-sample", "--out", d + "/in.csv"});
    REQUIRE(in_sample.code == 0);
    CHECK(nlohmann::json::parse(in_sample.out)["articles"] == 100);
    CHECK(run_cli({"fit", "--exposures", d + "/exposures", "--map", d + "/map.json", "--first-n", "1000", "--out",
                   d + "/p2.json"})
              .code == 2);
  }

  TEST_CASE("cache directory supplies default paths") {
    testing::TempDir dir;
    ::setenv(cli::kCacheDirEnv, dir.path().c_str(), 1);
    const auto sim = run_cli({"simulate", "--n-articles", "30"});
    const auto profile = run_cli({"profile"});
    const auto decycle = run_cli({"decycle"});
    const auto fit = run_cli({"fit", "--no-outlier-trim"});
    const auto predict = run_cli({"predict", "--v1", "1500", "--v25", "400"});
    const auto report = run_cli({"report", "--svg", "--article", "Synthetic_article_0003_(d'Artagnan)"});
    ::unsetenv(cli::kCacheDirEnv);
    CHECK(sim.code == 0);
    CHECK(profile.code == 0);
    CHECK(decycle.code == 0);
    CHECK(fit.code == 0);
    CHECK(predict.code == 0);
    CHECK(report.code == 0);
    CHECK(csv_rows(dir / "pred.csv") == 97);
    CHECK(fs::exists(dir / "figures" / "fig_gamma_law.csv"));
    CHECK(fs::exists(dir / "figures" / "fig_mean_series.svg"));
    CHECK(fs::exists(dir / "figures" / "fig_article_Synthetic_article_0003_(d%27Artagnan).svg"));
    CHECK(run_cli({"fit"}).code == 1);
  }

  TEST_CASE("predict output") {
    testing::TempDir dir;
    const auto d = dir.path().string();
    REQUIRE(run_cli({"simulate", "--n-articles", "20", "--out", d}).code == 0);
    REQUIRE(run_cli({"fit", "--exposures", d + "/exposures", "--map", d + "/truth_map.json", "--out",
                     d + "/params.json"})
                .code == 0);
    REQUIRE(run_cli({"predict", "--params", d + "/params.json", "--map", d + "/truth_map.json", "--v1", "2000",
                     "--out", d + "/pred.csv"})
                .code == 0);
    const auto text = artifacts::read_text_file(dir / "pred.csv");
    CHECK(text.rfind("hour,v_hat,band_low,band_high\n1,2000,2000,2000\n", 0) == 0);
    CHECK(run_cli({"predict", "--params", d + "/params.json", "--map", d + "/truth_map.json", "--v1", "0",
                   "--out", d + "/pred.csv"})
              .code == 2);
  }
}
