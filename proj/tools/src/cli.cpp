#include "pvdecay_cli/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <functional>
#include <optional>
#include <set>

#include "pvdecay/artifacts.hpp"
#include "pvdecay/circadian.hpp"
#include "pvdecay/error.hpp"
#include "pvdecay/ingest.hpp"
#include "pvdecay/model.hpp"
#include "pvdecay/percent.hpp"
#include "pvdecay/pipeline.hpp"
#include "pvdecay/predict.hpp"
#include "pvdecay/series.hpp"
#include "pvdecay/simulate.hpp"
#include "svg.hpp"

#ifndef PVDECAY_VERSION
#define PVDECAY_VERSION "unknown"
#endif

namespace pvdecay::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string opt_fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

struct Context {
  std::ostream& out;
  std::ostream& err;
  unsigned threads = 1;
  std::string command_line;
};

fs::path cache_path(const std::string& given, const char* flag, const char* default_name) {
  if (!given.empty()) return given;
  const char* env = std::getenv(kCacheDirEnv);
  if (env != nullptr && *env != '\0') return fs::path(env) / default_name;
  throw UsageError(std::string(flag) + " is required (or set " + kCacheDirEnv + ")");
}

fs::path input_file(const std::string& given, const char* flag, const char* default_name) {
  auto p = cache_path(given, flag, default_name);
  if (!fs::is_regular_file(p)) throw DataError("missing file: " + p.string());
  return p;
}

fs::path input_dir(const std::string& given, const char* flag, const char* default_name) {
  auto p = cache_path(given, flag, default_name);
  if (!fs::is_directory(p)) throw DataError("missing directory: " + p.string());
  return p;
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Timestamps live only in the sidecar so primary outputs stay byte-stable.
void write_meta(const fs::path& target, const Context& ctx) {
  json j;
  j["created_utc"] = utc_now();
  j["command"] = ctx.command_line;
  j["pvdecay_version"] = PVDECAY_VERSION;
  j["threads"] = ctx.threads;
  fs::path meta = fs::is_directory(target) ? target / "run.meta.json" : fs::path(target.string() + ".meta.json");
  artifacts::write_text_file(meta, j.dump(2) + "\n");
}

void clear_series_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) return;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pvs") fs::remove(entry.path());
  }
}

std::vector<ArticleExposure> load_complete(const fs::path& dir) {
  return pipeline::complete_only(load_exposures(dir));
}

std::string ensemble_csv(const predict::EnsembleReport& report) {
  std::string csv = "hour,method,n";
  for (const char* kind : {"norm", "abs"}) {
    for (double q : predict::kSummaryQuantiles) csv += std::string(",") + kind + "_q" + std::to_string(int(q * 100 + 0.5));
  }
  csv += ",coverage\n";
  auto rows = [&](const std::vector<predict::HourSummary>& hours, predict::Method method) {
    for (std::size_t h = 0; h < hours.size(); ++h) {
      const auto& s = hours[h];
      csv += std::to_string(h + 1) + ',' + predict::method_name(method) + ',' + std::to_string(s.n);
      for (double v : s.normalized_q) csv += ',' + fmt(v);
      for (double v : s.absolute_q) csv += ',' + fmt(v);
      csv += ',' + opt_fmt(s.coverage) + '\n';
    }
  };
  rows(report.v1_only, predict::Method::v1_only);
  rows(report.v1_and_v25, predict::Method::v1_and_v25);
  return csv;
}

json ensemble_summary(const predict::EnsembleReport& r, std::size_t skipped, bool in_sample) {
  return {{"articles", r.articles},
          {"skipped_first", skipped},
          {"in_sample", in_sample},
          {"median_abs_normalized_error_v1", r.median_abs_normalized_v1_only},
          {"median_abs_normalized_error_v1_v25", r.median_abs_normalized_v1_and_v25},
          {"mean_coverage", r.mean_coverage},
          {"undefined_entries", r.undefined_entries}};
}

// --- ingest -----------------------------------------------------------------

struct IngestArgs {
  std::string dumps, schedule, out, from, to, project = "en", front_page = "Main_Page";
};

void cmd_ingest(const IngestArgs& a, const Context& ctx) {
  ingest::IngestOptions o;
  o.dumps_dir = input_dir(a.dumps, "--dumps", "dumps");
  o.schedule_path = input_file(a.schedule, "--schedule", "schedule.csv");
  if (!a.from.empty()) o.from = parse_iso_date(a.from);
  if (!a.to.empty()) o.to = parse_iso_date(a.to);
  o.project = a.project;
  o.front_page_title = a.front_page;
  o.threads = ctx.threads;
  const fs::path out = cache_path(a.out, "--out", ".");

  const auto result = ingest::run_ingest(o);
  clear_series_files(out / "exposures");
  save_exposures(out / "exposures", result.exposures);
  write_series_file(out / "front_page.pvs", result.front_page);

  const auto& s = result.stats;
  json stats = {{"hours_needed", s.hours_needed},
                {"hours_missing", s.hours_missing},
                {"hours_incomplete", s.hours_incomplete},
                {"lines", s.lines},
                {"bad_lines", s.bad_lines},
                {"exposures_complete", s.exposures_complete},
                {"exposures_incomplete", s.exposures_incomplete},
                {"excluded", s.excluded}};
  json errors = json::array();
  for (const auto& e : s.sample_errors) errors.push_back({{"line", e.line_number}, {"message", e.message}});
  stats["sample_errors"] = std::move(errors);
  artifacts::write_text_file(out / "ingest_stats.json", stats.dump(2) + "\n");
  write_meta(out, ctx);
  ctx.out << "ingested " << result.exposures.size() << " exposures (" << s.exposures_complete << " complete); "
          << s.hours_missing << " of " << s.hours_needed << " hours missing, " << s.bad_lines
          << " malformed lines\n";
}

// --- profile / decycle ------------------------------------------------------

struct ProfileArgs {
  std::string series, out;
};

void cmd_profile(const ProfileArgs& a, const Context& ctx) {
  const auto series = read_series_file(input_file(a.series, "--series", "front_page.pvs"));
  const fs::path out = cache_path(a.out, "--out", "profile.json");
  const auto profile = circadian::CircadianProfile::make(circadian::compute_profile(series));
  artifacts::write_text_file(out, artifacts::profile_to_json(profile));
  write_meta(out, ctx);
  ctx.out << "profile written to " << out.string() << "\n";
}

struct DecycleArgs {
  std::string profile, mean_series, exposures, out;
  std::optional<std::size_t> first_n;
};

void cmd_decycle(const DecycleArgs& a, const Context& ctx) {
  if (!a.mean_series.empty() && !a.exposures.empty()) {
    throw UsageError("give either --mean-series or --exposures, not both");
  }
  const auto profile = artifacts::profile_from_json(
      artifacts::read_text_file(input_file(a.profile, "--profile", "profile.json")));
  std::vector<double> mean;
  if (!a.mean_series.empty()) {
    mean = artifacts::mean_series_from_csv(artifacts::read_text_file(input_file(a.mean_series, "--mean-series", "")));
  } else {
    const auto dir = input_dir(a.exposures, "--exposures", "exposures");
    auto exposures = load_complete(dir);
    if (a.first_n) exposures = pipeline::first_n(exposures, *a.first_n);
    mean = circadian::mean_series(exposures);
  }
  const fs::path out = cache_path(a.out, "--out", "map.json");
  const auto result = circadian::optimize_c(profile.m, mean);
  artifacts::write_text_file(out, artifacts::map_to_json(result));
  write_meta(out, ctx);

  std::vector<double> logs;
  for (double v : circadian::redistribute(mean, result.map)) logs.push_back(std::log(v));
  const auto r2 = circadian::stage_r_squared(logs);
  ctx.out << "c = " << fmt(result.c) << ", objective = " << fmt(result.objective) << ", R2 day 1 = "
          << fmt(r2.day_one_r2) << ", R2 days 2-4 = " << fmt(r2.later_r2) << "\n";
}

// --- fit --------------------------------------------------------------------

struct FitArgs {
  std::string exposures, map, out;
  std::optional<std::size_t> first_n;
  bool no_outlier_trim = false;
};

void cmd_fit(const FitArgs& a, const Context& ctx) {
  const auto dir = input_dir(a.exposures, "--exposures", "exposures");
  const auto decycle = artifacts::map_from_json(artifacts::read_text_file(input_file(a.map, "--map", "map.json")));
  const fs::path out = cache_path(a.out, "--out", "params.json");

  auto exposures = load_complete(dir);
  if (a.first_n) {
    if (exposures.size() < *a.first_n) {
      throw DataError("--first-n " + std::to_string(*a.first_n) + " exceeds the " +
                      std::to_string(exposures.size()) + " complete exposures");
    }
    exposures = pipeline::first_n(exposures, *a.first_n);
  }
  model::OutlierRule rule;
  rule.enabled = !a.no_outlier_trim;
  const auto params = pipeline::fit_corpus(exposures, decycle.map, rule, a.first_n, ctx.threads);
  artifacts::write_text_file(out, artifacts::params_to_json(params));
  write_meta(out, ctx);
  ctx.out << "beta = " << fmt(params.params.beta()) << ", gamma = " << fmt(params.params.gamma())
          << ", law m = " << fmt(params.law.m) << ", C = " << fmt(params.law.C) << ", sigma = "
          << fmt(params.law.sigma) << " (" << params.n_articles << " articles, "
          << params.outliers_removed.size() << " outliers)\n";
}

// --- predict / evaluate -----------------------------------------------------

struct PredictArgs {
  std::string params, map, out;
  double v1 = 0.0;
  std::optional<double> v25;
};

void cmd_predict(const PredictArgs& a, const Context& ctx) {
  const auto params =
      artifacts::params_from_json(artifacts::read_text_file(input_file(a.params, "--params", "params.json")));
  const auto decycle = artifacts::map_from_json(artifacts::read_text_file(input_file(a.map, "--map", "map.json")));
  const fs::path out = cache_path(a.out, "--out", "pred.csv");

  const auto base = predict::predict_from_v1(a.v1, params.params, params.law, decycle.map);
  std::optional<predict::PredictionResult> anchored;
  if (a.v25) anchored = predict::predict_with_v25(a.v1, *a.v25, params.params, decycle.map);

  std::string csv = "hour,v_hat,band_low,band_high";
  if (anchored) csv += ",v_hat_v25";
  csv += '\n';
  for (std::size_t t = 0; t < base.v_hat.size(); ++t) {
    csv += std::to_string(t + 1) + ',' + fmt(base.v_hat[t]) + ',' + fmt((*base.band_low)[t]) + ',' +
           fmt((*base.band_high)[t]);
    if (anchored) csv += ',' + fmt(anchored->v_hat[t]);
    csv += '\n';
  }
  artifacts::write_text_file(out, csv);
  write_meta(out, ctx);
  ctx.out << "prediction written to " << out.string() << "\n";
}

struct EvaluateArgs {
  std::string params, map, exposures, out;
  std::optional<std::size_t> skip_first;
  bool in_sample = false;
};

struct EvaluationSet {
  std::vector<ArticleExposure> exposures;
  std::size_t skipped = 0;
};

EvaluationSet evaluation_set(std::vector<ArticleExposure> all, const artifacts::FittedParams& params,
                             std::optional<std::size_t> skip_first, bool in_sample) {
  const std::size_t split = skip_first.value_or(params.first_n.value_or(0));
  if (in_sample) {
    if (split == 0) return {std::move(all), 0};
    return {pipeline::first_n(all, split), 0};
  }
  return {pipeline::after_first_n(all, split), std::min(split, all.size())};
}

void cmd_evaluate(const EvaluateArgs& a, const Context& ctx) {
  const auto params =
      artifacts::params_from_json(artifacts::read_text_file(input_file(a.params, "--params", "params.json")));
  const auto decycle = artifacts::map_from_json(artifacts::read_text_file(input_file(a.map, "--map", "map.json")));
  const auto dir = input_dir(a.exposures, "--exposures", "exposures");
  const fs::path out = cache_path(a.out, "--out", "report.csv");

  const auto set = evaluation_set(load_complete(dir), params, a.skip_first, a.in_sample);
  const auto report =
      predict::evaluate_ensemble(set.exposures, params.params, params.law, decycle.map, ctx.threads);
  artifacts::write_text_file(out, ensemble_csv(report));
  write_meta(out, ctx);
  ctx.out << ensemble_summary(report, set.skipped, a.in_sample).dump() << "\n";
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
  std::string config, out, mode;
  std::optional<std::size_t> n_articles;
  std::optional<std::uint64_t> seed;
  bool emit_dumps = false;
  bool gzip = false;
};

void cmd_simulate(const SimulateArgs& a, const Context& ctx) {
  simulate::SimConfig config;
  if (!a.config.empty()) {
    config = artifacts::sim_config_from_json(artifacts::read_text_file(input_file(a.config, "--config", "")));
  }
  if (a.n_articles) config.n_articles = *a.n_articles;
  if (a.seed) config.seed = *a.seed;
  if (a.mode == "per_user") config.mode = simulate::SimMode::per_user;
  if (a.mode == "poisson") config.mode = simulate::SimMode::poisson;
  const fs::path out = cache_path(a.out, "--out", ".");

  const auto corpus = simulate::simulate_corpus(config, ctx.threads);
  clear_series_files(out / "exposures");
  save_exposures(out / "exposures", corpus.exposures);
  write_series_file(out / "front_page.pvs", corpus.front_page);
  artifacts::write_text_file(out / "schedule.csv", ingest::format_schedule(corpus.schedule));
  artifacts::write_text_file(out / "sim_config.json", artifacts::sim_config_to_json(config));
  artifacts::write_text_file(out / "truth.json", artifacts::truth_to_json(config, corpus.truth));
  artifacts::write_text_file(out / "profile.json", artifacts::profile_to_json(config.profile));
  circadian::DecycleResult truth_map{config.profile.c, config.profile, corpus.map, 0.0};
  artifacts::write_text_file(out / "truth_map.json", artifacts::map_to_json(truth_map));
  if (!corpus.exposures.empty()) {
    artifacts::write_text_file(out / "mean_series.csv",
                               artifacts::mean_series_to_csv(circadian::mean_series(corpus.exposures)));
  }
  if (a.emit_dumps) {
    const auto dumps = out / "dumps";
    if (fs::is_directory(dumps)) {
      for (const auto& entry : fs::directory_iterator(dumps)) {
        if (entry.is_regular_file() && parse_dump_filename(entry.path().filename().string())) fs::remove(entry.path());
      }
    }
    simulate::write_dump_files(corpus, dumps, config.project, a.gzip, ctx.threads);
  }
  write_meta(out, ctx);
  ctx.out << "simulated " << corpus.exposures.size() << " articles into " << out.string() << "\n";
}

// --- report -----------------------------------------------------------------

struct ReportArgs {
  std::string params, map, exposures, out;
  std::vector<std::string> articles;
  std::optional<std::size_t> skip_first;
  bool svg = false;
};

std::vector<double> iota_hours(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(i + 1);
  return x;
}

void cmd_report(const ReportArgs& a, const Context& ctx) {
  const auto params =
      artifacts::params_from_json(artifacts::read_text_file(input_file(a.params, "--params", "params.json")));
  const auto decycle = artifacts::map_from_json(artifacts::read_text_file(input_file(a.map, "--map", "map.json")));
  const auto dir = input_dir(a.exposures, "--exposures", "exposures");
  const fs::path out = cache_path(a.out, "--out", "figures");
  fs::create_directories(out);
  const auto all = load_complete(dir);
  if (all.empty()) throw DataError("no complete exposures in " + dir.string());
  auto save = [&](const std::string& name, const std::string& text) { artifacts::write_text_file(out / name, text); };

  // Circadian profile.
  const auto& profile = decycle.profile;
  std::string csv = "hour,m,m_star\n";
  for (int h = 0; h < kHoursPerDay; ++h) csv += std::to_string(h) + ',' + fmt(profile.m[h]) + ',' + fmt(profile.m_star[h]) + '\n';
  save("fig_profile.csv", csv);

  // Mean series in both time scales with the fitted trend.
  const auto mean = circadian::mean_series(all);
  const auto mean_star = circadian::redistribute(mean, decycle.map);
  std::vector<double> log_star;
  for (double v : mean_star) log_star.push_back(std::log(v));
  std::optional<circadian::PiecewiseTrend> trend;
  try {
    trend = circadian::fit_piecewise_trend(log_star);
  } catch (const NumericalError&) {
  }
  csv = "t,mean_real,mean_redistributed,log_redistributed,trend\n";
  std::vector<double> trend_values;
  for (std::size_t t = 0; t < mean.size(); ++t) {
    const double g = trend ? (*trend)(static_cast<int>(t + 1)) : NAN;
    trend_values.push_back(std::exp(g));
    csv += std::to_string(t + 1) + ',' + fmt(mean[t]) + ',' + fmt(mean_star[t]) + ',' + fmt(log_star[t]) + ',' +
           (trend ? fmt(g) : std::string()) + '\n';
  }
  save("fig_mean_series.csv", csv);

  // Gamma law scatter.
  const std::set<std::string> outliers(params.outliers_removed.begin(), params.outliers_removed.end());
  const auto v_star = pipeline::redistribute_all(all, decycle.map, ctx.threads);
  csv = "title,v1,gamma,law_gamma,outlier\n";
  std::vector<double> law_x, law_y, fit_y;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto v1 = static_cast<double>(all[i].v(1));
    if (v1 <= 0.0) continue;
    double g = 0.0;
    try {
      g = model::per_article_gamma(v_star[i], params.params.beta()).gamma;
    } catch (const DataError&) {
      continue;
    }
    law_x.push_back(v1);
    law_y.push_back(g);
    fit_y.push_back(params.law.gamma(v1));
    csv += percent_encode(all[i].title) + ',' + fmt(v1) + ',' + fmt(g) + ',' + fmt(params.law.gamma(v1)) + ',' +
           (outliers.contains(all[i].title) ? "1" : "0") + '\n';
  }
  save("fig_gamma_law.csv", csv);

  // First-hour views.
  csv = "title,v1,log_v1\n";
  for (const auto& e : all) {
    const auto v1 = static_cast<double>(e.v(1));
    csv += percent_encode(e.title) + ',' + fmt(v1) + ',' + (v1 > 0 ? fmt(std::log(v1)) : std::string()) + '\n';
  }
  save("fig_v1.csv", csv);

  // Prediction errors on the evaluation set.
  const auto set = evaluation_set(all, params, a.skip_first, false);
  std::optional<predict::EnsembleReport> report;
  if (!set.exposures.empty()) {
    report = predict::evaluate_ensemble(set.exposures, params.params, params.law, decycle.map, ctx.threads);
    save("fig_errors.csv", ensemble_csv(*report));
  }

  // Case studies.
  std::vector<std::pair<std::string, std::string>> article_files;
  for (const auto& title : a.articles) {
    const auto it = std::find_if(all.begin(), all.end(), [&](const auto& e) { return e.title == title; });
    if (it == all.end()) throw DataError("no complete exposure titled " + title);
    const auto obs = it->as_doubles();
    const auto base = predict::predict_from_v1(obs[0], params.params, params.law, decycle.map);
    std::optional<predict::PredictionResult> anchored;
    if (obs[kDemotionHour - 1] > 0) {
      anchored = predict::predict_with_v25(obs[0], obs[kDemotionHour - 1], params.params, decycle.map);
    }
    csv = "hour,observed,v_hat,band_low,band_high,v_hat_v25\n";
    for (std::size_t t = 0; t < obs.size(); ++t) {
      csv += std::to_string(t + 1) + ',' + fmt(obs[t]) + ',' + fmt(base.v_hat[t]) + ',' + fmt((*base.band_low)[t]) +
             ',' + fmt((*base.band_high)[t]) + ',' + (anchored ? fmt(anchored->v_hat[t]) : std::string()) + '\n';
    }
    const std::string name = "fig_article_" + percent_encode(title);
    save(name + ".csv", csv);
    if (a.svg) {
      Plot p{title, "exposure hour", "views", true, {}};
      p.series.push_back({"observed", iota_hours(obs.size()), obs, true});
      p.series.push_back({"v1 model", iota_hours(obs.size()), base.v_hat, false});
      p.series.push_back({"band low", iota_hours(obs.size()), *base.band_low, false});
      p.series.push_back({"band high", iota_hours(obs.size()), *base.band_high, false});
      if (anchored) p.series.push_back({"v1+v25 model", iota_hours(obs.size()), anchored->v_hat, false});
      save(name + ".svg", render_svg(p));
    }
  }

  if (a.svg) {
    std::vector<double> hours(kHoursPerDay), m(profile.m.begin(), profile.m.end()),
        ms(profile.m_star.begin(), profile.m_star.end());
    for (int h = 0; h < kHoursPerDay; ++h) hours[h] = h;
    save("fig_profile.svg", render_svg({"Front-page views by UTC hour", "hour (UTC)", "views", false,
                                        {{"m", hours, m, false}, {"m*", hours, ms, false}}}));
    save("fig_mean_series.svg",
         render_svg({"Mean views", "hour", "views", true,
                     {{"real time", iota_hours(mean.size()), mean, false},
                      {"redistributed", iota_hours(mean_star.size()), mean_star, false},
                      {"trend", iota_hours(trend_values.size()), trend_values, false}}}));
    std::vector<double> log_x;
    for (double v : law_x) log_x.push_back(std::log10(v));
    save("fig_gamma_law.svg", render_svg({"Jump factor against first-hour views", "log10 v1", "gamma", true,
                                          {{"articles", log_x, law_y, true}, {"law", log_x, fit_y, true}}}));
    if (report) {
      std::vector<double> med1, med2;
      for (const auto& s : report->v1_only) med1.push_back(s.normalized_q[2]);
      for (const auto& s : report->v1_and_v25) med2.push_back(s.normalized_q[2]);
      save("fig_errors.svg", render_svg({"Median normalised error", "hour", "(v_hat - v) / v", false,
                                         {{"v1", iota_hours(med1.size()), med1, false},
                                          {"v1+v25", iota_hours(med2.size()), med2, false}}}));
    }
  }
  write_meta(out, ctx);
  ctx.out << "figures written to " << out.string() << "\n";
}

// --- entry point ------------------------------------------------------------

const char* kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage: return "usage";
    case ErrorKind::data: return "data";
    case ErrorKind::numerical: return "numerical";
  }
  return "unknown";
}

int fail(std::ostream& err, const char* kind, int code, const std::string& message) {
  json j = {{"error", {{"kind", kind}, {"exit_code", code}, {"message", message}}}};
  err << j.dump() << "\n";
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Page-view decay modelling for promoted articles", "pvdecay"};
  app.set_version_flag("--version", PVDECAY_VERSION);
  app.require_subcommand(1);
  app.fallthrough();
  unsigned threads = 1;
  app.add_option("--threads", threads, "Worker threads; results do not depend on it")
      ->check(CLI::Range(1u, 1024u));
  const std::string cache_note = std::string("Paths default to $") + kCacheDirEnv + " when omitted.";
  app.footer(cache_note);

  IngestArgs ingest_args;
  auto* ingest = app.add_subcommand("ingest", "Build exposure series from pagecounts-raw hour files");
  ingest->add_option("--dumps", ingest_args.dumps, "Directory of pagecounts-YYYYMMDD-HH0000[.gz] files");
  ingest->add_option("--schedule", ingest_args.schedule, "CSV date,title[,excluded]");
  ingest->add_option("--out", ingest_args.out, "Output directory");
  ingest->add_option("--from", ingest_args.from, "First promotion date (YYYY-MM-DD)");
  ingest->add_option("--to", ingest_args.to, "Last promotion date (YYYY-MM-DD)");
  ingest->add_option("--project", ingest_args.project, "Project code")->capture_default_str();
  ingest->add_option("--front-page", ingest_args.front_page, "Front page title")->capture_default_str();

  ProfileArgs profile_args;
  auto* profile = app.add_subcommand("profile", "Hour-of-day profile of the front page");
  profile->add_option("--series", profile_args.series, "Front-page .pvs series");
  profile->add_option("--out", profile_args.out, "profile.json");

  DecycleArgs decycle_args;
  auto* decycle = app.add_subcommand("decycle", "Optimise the decycling fraction and build the time map");
  decycle->add_option("--profile", decycle_args.profile, "profile.json");
  decycle->add_option("--mean-series", decycle_args.mean_series, "CSV t,views of mean real-time views");
  decycle->add_option("--exposures", decycle_args.exposures, "Exposure directory to average instead");
  decycle->add_option("--first-n", decycle_args.first_n, "Average only the first N exposures");
  decycle->add_option("--out", decycle_args.out, "map.json");

  FitArgs fit_args;
  auto* fit = app.add_subcommand("fit", "Fit beta, gamma and the gamma law");
  fit->add_option("--exposures", fit_args.exposures, "Exposure directory");
  fit->add_option("--map", fit_args.map, "map.json");
  fit->add_option("--first-n", fit_args.first_n, "Train on the first N exposures by promotion date");
  fit->add_flag("--no-outlier-trim", fit_args.no_outlier_trim, "Keep every article in the gamma law");
  fit->add_option("--out", fit_args.out, "params.json");

  PredictArgs predict_args;
  auto* pred = app.add_subcommand("predict", "Forecast 96 hours from v1 (and optionally v25)");
  pred->add_option("--params", predict_args.params, "params.json");
  pred->add_option("--map", predict_args.map, "map.json");
  pred->add_option("--v1", predict_args.v1, "Views in the first exposure hour")->required();
  pred->add_option("--v25", predict_args.v25, "Views in exposure hour 25");
  pred->add_option("--out", predict_args.out, "pred.csv");

  EvaluateArgs evaluate_args;
  auto* evaluate = app.add_subcommand("evaluate", "Per-hour error quantiles and band coverage");
  evaluate->add_option("--params", evaluate_args.params, "params.json");
  evaluate->add_option("--map", evaluate_args.map, "map.json");
  evaluate->add_option("--exposures", evaluate_args.exposures, "Exposure directory");
  evaluate->add_option("--skip-first", evaluate_args.skip_first,
                       "Exclude the first N exposures (default: the training size in params.json)");
  evaluate->add_flag("--in-sample", evaluate_args.in_sample, "Evaluate the training exposures instead");
  evaluate->add_option("--out", evaluate_args.out, "report.csv");

  SimulateArgs simulate_args;
  auto* sim = app.add_subcommand("simulate", "Generate a synthetic corpus");
  sim->add_option("--config", simulate_args.config, "sim.json (missing keys take defaults)");
  sim->add_option("--out", simulate_args.out, "Output directory");
  sim->add_option("--n-articles", simulate_args.n_articles, "Override n_articles");
  sim->add_option("--seed", simulate_args.seed, "Override the seed");
  sim->add_option("--mode", simulate_args.mode, "poisson or per_user")->check(CLI::IsMember({"poisson", "per_user"}));
  sim->add_flag("--emit-dumps", simulate_args.emit_dumps, "Also write pagecounts-raw hour files");
  sim->add_flag("--gzip", simulate_args.gzip, "Compress emitted hour files");

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "Figure data as CSV, optionally SVG");
  report->add_option("--params", report_args.params, "params.json");
  report->add_option("--map", report_args.map, "map.json");
  report->add_option("--exposures", report_args.exposures, "Exposure directory");
  report->add_option("--article", report_args.articles, "Case-study title (repeatable)");
  report->add_option("--skip-first", report_args.skip_first, "Exclude the first N exposures from error figures");
  report->add_flag("--svg", report_args.svg, "Render SVG plots next to the CSVs");
  report->add_option("--out", report_args.out, "Output directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    return fail(err, "usage", static_cast<int>(ErrorKind::usage), e.what());
  }

  Context ctx{out, err, threads, "pvdecay"};
  for (const auto& a : args) ctx.command_line += " " + a;

  const std::vector<std::pair<CLI::App*, std::function<void()>>> commands{
      {ingest, [&] { cmd_ingest(ingest_args, ctx); }},
      {profile, [&] { cmd_profile(profile_args, ctx); }},
      {decycle, [&] { cmd_decycle(decycle_args, ctx); }},
      {fit, [&] { cmd_fit(fit_args, ctx); }},
      {pred, [&] { cmd_predict(predict_args, ctx); }},
      {evaluate, [&] { cmd_evaluate(evaluate_args, ctx); }},
      {sim, [&] { cmd_simulate(simulate_args, ctx); }},
      {report, [&] { cmd_report(report_args, ctx); }},
  };
  try {
    for (const auto& [sub, action] : commands) {
      if (sub->parsed()) action();
    }
  } catch (const Error& e) {
    return fail(err, kind_name(e.kind()), static_cast<int>(e.kind()), e.what());
  } catch (const fs::filesystem_error& e) {
    return fail(err, "data", static_cast<int>(ErrorKind::data), e.what());
  } catch (const std::exception& e) {
    return fail(err, "internal", static_cast<int>(ErrorKind::numerical), e.what());
  }
  return 0;
}

}  // namespace pvdecay::cli
