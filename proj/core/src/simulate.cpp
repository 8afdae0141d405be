#include "pvdecay/simulate.hpp"

#include <zlib.h>

#include <cmath>
#include <cstdio>
#include <numbers>

#include "pvdecay/error.hpp"
#include "pvdecay/parallel.hpp"
#include "pvdecay/percent.hpp"
#include "pvdecay/predict.hpp"

namespace pvdecay::simulate {
namespace fs = std::filesystem;

namespace {

struct Share {
  int hour;
  double fraction;
};

std::vector<std::vector<Share>> interval_shares(const circadian::RedistributionMap& map) {
  std::vector<std::vector<Share>> shares(static_cast<std::size_t>(map.intervals()));
  map.for_each_overlap(
      [&](int j, int k, double overlap) { shares[j].push_back({k, overlap / map.length(j)}); });
  return shares;
}

void add_geometric_arrivals(std::vector<Count>& counts, std::int64_t users, double beta,
                            int first_hour, int last_hour, Xoshiro256& rng) {
  const double log_beta = std::log(beta);
  for (std::int64_t u = 0; u < users; ++u) {
    const double uniform = 1.0 - rng.uniform();  // (0, 1]
    const auto offset = static_cast<std::int64_t>(std::floor(std::log(uniform) / log_beta));
    const std::int64_t hour = first_hour + offset;
    if (hour <= last_hour) ++counts[static_cast<std::size_t>(hour - 1)];
  }
}

}  // namespace

circadian::HourProfile sinusoidal_profile(double mean, double amplitude, double trough_hour) {
  circadian::HourProfile m{};
  for (int h = 0; h < kHoursPerDay; ++h) {
    const double phase = 2.0 * std::numbers::pi * ((h + 0.5) - trough_hour) / kHoursPerDay;
    m[h] = mean * (1.0 - amplitude * std::cos(phase));
  }
  return m;
}

double draw_v1(const model::V1Distribution& dist, Xoshiro256& rng) {
  const double v = std::round(std::exp(draw_normal(rng, dist.mu, dist.sigma)));
  return std::max(1.0, v);
}

std::vector<double> sample_v1(const SimConfig& config, std::size_t count) {
  auto rng = Xoshiro256::for_stream(config.seed, kV1Stream, 0);
  std::vector<double> out(count);
  for (auto& v : out) v = draw_v1(config.v1_dist, rng);
  return out;
}

std::vector<double> expected_counts(double v1, double gamma_s, double beta,
                                    const circadian::RedistributionMap& map) {
  const auto w = predict::real_time_curve(beta, gamma_s, map);
  std::vector<double> out(w.size());
  for (std::size_t t = 0; t < w.size(); ++t) out[t] = v1 * w[t] / w[0];
  return out;
}

ArticleExposure simulate_article(double v1, double gamma_s, const model::ModelParams& params,
                                 const circadian::RedistributionMap& map, Xoshiro256& rng,
                                 SimMode mode) {
  if (!(v1 > 0.0) || !(gamma_s > 0.0)) throw DataError("simulate_article: v1 and gamma must be positive");
  if (map.intervals() != kExposureHours) throw DataError("simulate_article needs a 96-hour map");
  const double beta = params.beta();
  const auto w = model::curve_w_star(beta, gamma_s, kExposureHours);
  const auto real = circadian::reverse_redistribute(w, map);
  const double v1_star = v1 / real[0];

  std::vector<Count> star(kExposureHours, 0);
  if (mode == SimMode::poisson) {
    for (std::size_t j = 0; j < star.size(); ++j) star[j] = draw_poisson(rng, v1_star * w[j]);
  } else {
    if (!(beta < 1.0)) throw DataError("per-user simulation needs beta < 1");
    // Population sizes follow from P(T = t) = beta^(t-1) (1 - beta).
    const auto day_one_users = draw_poisson(rng, v1_star / (1.0 - beta));
    add_geometric_arrivals(star, day_one_users, beta, 1, kDemotionHour - 1, rng);
    const double later_mean = gamma_s * v1_star * std::pow(beta, kDemotionHour - 2) / (1.0 - beta);
    add_geometric_arrivals(star, draw_poisson(rng, later_mean), beta, kDemotionHour, kExposureHours, rng);
  }

  ArticleExposure e;
  std::vector<Count> counts(kExposureHours, 0);
  const auto shares = interval_shares(map);
  for (std::size_t j = 0; j < star.size(); ++j) {
    Count remaining = star[j];
    double mass_left = 1.0;
    const auto& s = shares[j];
    for (std::size_t i = 0; i + 1 < s.size() && remaining > 0; ++i) {
      const double p = std::clamp(s[i].fraction / mass_left, 0.0, 1.0);
      const Count taken = draw_binomial(rng, remaining, p);
      counts[static_cast<std::size_t>(s[i].hour)] += taken;
      remaining -= taken;
      mass_left -= s[i].fraction;
    }
    counts[static_cast<std::size_t>(s.back().hour)] += remaining;
  }
  for (std::size_t t = 0; t < counts.size(); ++t) e.views[t] = counts[t];
  e.v_star = std::vector<double>(star.begin(), star.end());
  return e;
}

std::string article_title(const SimConfig& config, std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04zu", index);
  std::string title = config.title_prefix + buf;
  // Some titles carry characters that need percent-encoding in dumps.
  if (index % 5 == 3) title += "_(d'Artagnan)";
  return title;
}

SimulatedCorpus simulate_corpus(const SimConfig& config, unsigned threads) {
  SimulatedCorpus corpus;
  corpus.map = circadian::RedistributionMap::from_profile(config.profile);
  corpus.front_page.title = config.front_page_title;
  corpus.front_page.start = config.start;
  if (config.start.hour_of_day() != 0) throw DataError("simulation start must be at 00h UTC");

  const std::size_t n = config.n_articles;
  corpus.exposures.resize(n);
  corpus.truth.resize(n);
  parallel_for(n, threads, [&](std::size_t i) {
    auto rng = Xoshiro256::for_stream(config.seed, kArticleStream, i);
    auto& truth = corpus.truth[i];
    truth.title = article_title(config, i);
    truth.promoted_at = config.start + static_cast<std::int64_t>(i) * kHoursPerDay;
    truth.v1 = draw_v1(config.v1_dist, rng);
    truth.gamma_s = std::exp(config.law.h(truth.v1) + draw_normal(rng, 0.0, config.law.sigma));
    auto exposure = simulate_article(truth.v1, truth.gamma_s, config.params, corpus.map, rng, config.mode);
    exposure.title = truth.title;
    exposure.promoted_at = truth.promoted_at;
    corpus.exposures[i] = std::move(exposure);
  });

  for (const auto& t : corpus.truth) corpus.schedule.entries.push_back({t.promoted_at, t.title, false});

  if (n > 0) {
    const auto hours = static_cast<std::size_t>((n - 1) * kHoursPerDay + kExposureHours);
    auto rng = Xoshiro256::for_stream(config.seed, kFrontPageStream, 0);
    corpus.front_page.counts.reserve(hours);
    for (std::size_t i = 0; i < hours; ++i) {
      const int h = (config.start + static_cast<std::int64_t>(i)).hour_of_day();
      corpus.front_page.counts.emplace_back(draw_poisson(rng, config.profile.m[h]));
    }
  }
  return corpus;
}

void write_dump_files(const SimulatedCorpus& corpus, const fs::path& dir, const std::string& project,
                      bool gzip, unsigned threads) {
  fs::create_directories(dir);
  const auto& fp = corpus.front_page;
  const std::string fp_title = percent_encode(fp.title);
  std::vector<std::string> titles;
  for (const auto& e : corpus.exposures) titles.push_back(percent_encode(e.title));

  parallel_for(fp.counts.size(), threads, [&](std::size_t i) {
    const UtcHour hour = fp.start + static_cast<std::int64_t>(i);
    std::string body;
    auto emit = [&](const std::string& title, Count views) {
      if (views <= 0) return;
      body += project + ' ' + title + ' ' + std::to_string(views) + ' ' + std::to_string(views * 20480) + '\n';
    };
    if (fp.counts[i]) emit(fp_title, *fp.counts[i]);
    for (std::size_t a = 0; a < corpus.exposures.size(); ++a) {
      const auto& e = corpus.exposures[a];
      const auto offset = hour - e.promoted_at;
      if (offset < 0 || offset >= kExposureHours) continue;
      if (const auto& slot = e.views[static_cast<std::size_t>(offset)]) emit(titles[a], *slot);
    }

    const fs::path path = dir / dump_filename(hour, gzip);
    if (gzip) {
      gzFile f = gzopen(path.c_str(), "wb");
      if (f == nullptr) throw DataError("cannot write " + path.string());
      const int written = body.empty() ? 0 : gzwrite(f, body.data(), static_cast<unsigned>(body.size()));
      const int closed = gzclose(f);
      if (written != static_cast<int>(body.size()) || closed != Z_OK) {
        throw DataError("write failed: " + path.string());
      }
    } else {
      std::FILE* f = std::fopen(path.c_str(), "wb");
      if (f == nullptr) throw DataError("cannot write " + path.string());
      const auto written = std::fwrite(body.data(), 1, body.size(), f);
      if (std::fclose(f) != 0 || written != body.size()) throw DataError("write failed: " + path.string());
    }
  });
}

}  // namespace pvdecay::simulate
