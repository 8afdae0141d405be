#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pvdecay/circadian.hpp"
#include "pvdecay/model.hpp"
#include "pvdecay/simulate.hpp"

// Versioned JSON artifacts. Every file carries "schema" and "version";
// loaders throw DataError when either does not match.
namespace pvdecay::artifacts {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kProfileSchema = "pvdecay.profile";
inline constexpr const char* kMapSchema = "pvdecay.map";
inline constexpr const char* kParamsSchema = "pvdecay.params";
inline constexpr const char* kSimConfigSchema = "pvdecay.sim_config";
inline constexpr const char* kTruthSchema = "pvdecay.truth";

struct FittedParams {
  model::ModelParams params = model::ModelParams::make(1.0, 1.0);
  model::GammaLaw law;
  model::V1Distribution v1_dist;
  std::size_t n_articles = 0;
  std::optional<std::size_t> first_n;
  std::size_t skipped_terms = 0;
  std::vector<std::string> outliers_removed;
  double pearson = 0.0;
  double objective = 0.0;
};

std::string profile_to_json(const circadian::CircadianProfile& profile);
circadian::CircadianProfile profile_from_json(const std::string& text);

/// The map file also stores the profile it was built from; loading rebuilds
/// the boundaries and refuses a file whose stored boundaries disagree.
std::string map_to_json(const circadian::DecycleResult& result);
circadian::DecycleResult map_from_json(const std::string& text);

std::string params_to_json(const FittedParams& params);
FittedParams params_from_json(const std::string& text);

/// Missing keys take SimConfig defaults; "schema" and "version" are
/// optional here so hand-written configs stay short.
std::string sim_config_to_json(const simulate::SimConfig& config);
simulate::SimConfig sim_config_from_json(const std::string& text);

std::string truth_to_json(const simulate::SimConfig& config,
                          const std::vector<simulate::ArticleTruth>& truth);
std::vector<simulate::ArticleTruth> truth_from_json(const std::string& text);

/// Two-column CSV `t,views` for t = 1..n.
std::string mean_series_to_csv(const std::vector<double>& series);
std::vector<double> mean_series_from_csv(const std::string& text);

std::string read_text_file(const std::filesystem::path& path);
/// Writes through a temporary file and renames it into place.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace pvdecay::artifacts
