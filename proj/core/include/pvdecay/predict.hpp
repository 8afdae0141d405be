#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "pvdecay/circadian.hpp"
#include "pvdecay/model.hpp"
#include "pvdecay/series.hpp"

namespace pvdecay::predict {

enum class Method { v1_only, v1_and_v25 };

const char* method_name(Method method);

struct PredictionResult {
  Method method = Method::v1_only;
  double v1 = 0.0;
  std::optional<double> v25;
  /// Predicted views for real exposure hours 1..96.
  std::vector<double> v_hat;
  /// Envelope from the gamma interval; equals v_hat before demotion.
  std::optional<std::vector<double>> band_low;
  std::optional<std::vector<double>> band_high;
};

/// Normalised real-time model curve: curve_w_star over 96 redistributed
/// hours mapped back to real hours.
std::vector<double> real_time_curve(double beta, double gamma, const circadian::RedistributionMap& map);

/// Forecast from the first-hour views alone, with gamma taken from the law
/// and a band from the law's +-sigma interval. Throws DataError if v1 <= 0.
PredictionResult predict_from_v1(double v1, const model::ModelParams& params,
                                 const model::GammaLaw& law,
                                 const circadian::RedistributionMap& map);

/// Re-anchors hours 25..96 on the observed v25; hours 1..24 match
/// predict_from_v1 exactly. No band.
PredictionResult predict_with_v25(double v1, double v25, const model::ModelParams& params,
                                  const circadian::RedistributionMap& map);

struct ErrorReport {
  /// (v_hat - v) / v per hour; empty where v == 0.
  std::vector<std::optional<double>> normalized;
  std::vector<double> absolute;
  std::size_t undefined = 0;
  /// Fraction of hours 25..95 with v inside the band; absent without a band.
  std::optional<double> coverage;
};

/// Throws DataError if the observation is incomplete.
ErrorReport error_report(const PredictionResult& prediction, const ArticleExposure& observed);

/// Per-hour summary of one method over many articles.
struct HourSummary {
  std::size_t n = 0;              // articles with a defined normalised error
  std::array<double, 5> normalized_q{};  // 10, 25, 50, 75, 90 %
  std::array<double, 5> absolute_q{};
  std::optional<double> coverage;  // fraction of articles inside the band
};

inline constexpr std::array<double, 5> kSummaryQuantiles{0.10, 0.25, 0.50, 0.75, 0.90};

struct EnsembleReport {
  std::vector<HourSummary> v1_only;     // 96 hours
  std::vector<HourSummary> v1_and_v25;  // 96 hours
  std::size_t articles = 0;
  /// Median |normalised error| over hours 25..95, pooled over articles.
  double median_abs_normalized_v1_only = 0.0;
  double median_abs_normalized_v1_and_v25 = 0.0;
  /// Mean band coverage over hours 25..95.
  double mean_coverage = 0.0;
  std::size_t undefined_entries = 0;
};

EnsembleReport evaluate_ensemble(std::span<const ArticleExposure> exposures,
                                 const model::ModelParams& params, const model::GammaLaw& law,
                                 const circadian::RedistributionMap& map, unsigned threads = 1);

}  // namespace pvdecay::predict
