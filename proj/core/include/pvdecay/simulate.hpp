#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pvdecay/circadian.hpp"
#include "pvdecay/ingest.hpp"
#include "pvdecay/model.hpp"
#include "pvdecay/random.hpp"
#include "pvdecay/series.hpp"

namespace pvdecay::simulate {

enum class SimMode {
  /// Poisson counts per redistributed hour (superposition of user processes).
  poisson,
  /// Individual users with geometric first-visit hours; slow, for cross-checks.
  per_user,
};

/// Sinusoidal front-page profile with its trough around 08h UTC.
circadian::HourProfile sinusoidal_profile(double mean, double amplitude, double trough_hour = 8.5);

struct SimConfig {
  std::size_t n_articles = 200;
  model::ModelParams params = model::ModelParams::make(0.9874, 0.2319);
  model::GammaLaw law{-0.132, 0.862, 0.2};
  model::V1Distribution v1_dist{7.63, 0.71};
  circadian::CircadianProfile profile =
      circadian::CircadianProfile::make(sinusoidal_profile(2.5e5, 0.3), 0.162);
  std::uint64_t seed = 2013;
  UtcHour start = utc_hour(2008, 1, 1);
  SimMode mode = SimMode::poisson;
  std::string title_prefix = "Synthetic_article_";
  std::string front_page_title = "Main_Page";
  std::string project = "en";
};

// Stream identifiers for Xoshiro256::for_stream.
inline constexpr std::uint64_t kV1Stream = 1;
inline constexpr std::uint64_t kArticleStream = 2;
inline constexpr std::uint64_t kFrontPageStream = 3;

/// One log-normal draw rounded to the nearest positive integer.
double draw_v1(const model::V1Distribution& dist, Xoshiro256& rng);
/// `count` draws from the config's v1 stream.
std::vector<double> sample_v1(const SimConfig& config, std::size_t count);

/// Expected real-hour counts of an article: the model curve with jump
/// gamma_s, mapped to real time and scaled so hour 1 expects v1 views.
std::vector<double> expected_counts(double v1, double gamma_s, double beta,
                                    const circadian::RedistributionMap& map);

/// Draws one exposure. Redistributed-hour counts are Poisson around
/// v*_1 * w_t*(beta, gamma_s) and are split over real hours multinomially in
/// proportion to wall-clock overlap. `v_star` carries the redistributed
/// counts; title and promotion time are left for the caller.
ArticleExposure simulate_article(double v1, double gamma_s, const model::ModelParams& params,
                                 const circadian::RedistributionMap& map, Xoshiro256& rng,
                                 SimMode mode = SimMode::poisson);

struct ArticleTruth {
  std::string title;
  UtcHour promoted_at;
  double v1 = 0.0;       // expected first-hour views
  double gamma_s = 0.0;  // the article's own jump
};

struct SimulatedCorpus {
  std::vector<ArticleExposure> exposures;
  std::vector<ArticleTruth> truth;
  HourlySeries front_page;
  ingest::PromotionSchedule schedule;
  circadian::RedistributionMap map = circadian::RedistributionMap::identity();
};

std::string article_title(const SimConfig& config, std::size_t index);

/// Article i is promoted i days after config.start. Output depends only on
/// the config, never on `threads`.
SimulatedCorpus simulate_corpus(const SimConfig& config, unsigned threads = 1);

/// Writes pagecounts-raw hour files covering the front-page series. Zero
/// counts are omitted, as in the real dumps.
void write_dump_files(const SimulatedCorpus& corpus, const std::filesystem::path& dir,
                      const std::string& project = "en", bool gzip = false, unsigned threads = 1);

}  // namespace pvdecay::simulate
