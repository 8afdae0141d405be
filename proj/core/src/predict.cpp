#include "pvdecay/predict.hpp"

#include <cmath>

#include "pvdecay/error.hpp"
#include "pvdecay/parallel.hpp"
#include "pvdecay/stats.hpp"

namespace pvdecay::predict {

namespace {

constexpr std::size_t kDay = static_cast<std::size_t>(kHoursPerDay);

std::vector<double> scaled(const std::vector<double>& w, double v1) {
  const double k = v1 / w[0];
  std::vector<double> out(w.size());
  for (std::size_t t = 0; t < w.size(); ++t) out[t] = k * w[t];
  return out;
}

}  // namespace

const char* method_name(Method method) {
  return method == Method::v1_only ? "v1" : "v1+v25";
}

std::vector<double> real_time_curve(double beta, double gamma, const circadian::RedistributionMap& map) {
  if (map.intervals() != kExposureHours) throw DataError("prediction needs a 96-hour map");
  return circadian::reverse_redistribute(model::curve_w_star(beta, gamma, kExposureHours), map);
}

PredictionResult predict_from_v1(double v1, const model::ModelParams& params,
                                 const model::GammaLaw& law,
                                 const circadian::RedistributionMap& map) {
  if (!(v1 > 0.0)) throw DataError("v1 must be positive");
  PredictionResult r;
  r.method = Method::v1_only;
  r.v1 = v1;
  r.v_hat = scaled(real_time_curve(params.beta(), law.gamma(v1), map), v1);

  // The first day does not depend on gamma, so all three curves share the
  // same anchor w_1 and agree before demotion.
  const auto interval = model::gamma_interval(law, v1);
  r.band_low = scaled(real_time_curve(params.beta(), std::exp(interval.low), map), v1);
  r.band_high = scaled(real_time_curve(params.beta(), std::exp(interval.high), map), v1);
  return r;
}

PredictionResult predict_with_v25(double v1, double v25, const model::ModelParams& params,
                                  const circadian::RedistributionMap& map) {
  if (!(v1 > 0.0) || !(v25 > 0.0)) throw DataError("v1 and v25 must be positive");
  if (map.intervals() != kExposureHours) throw DataError("prediction needs a 96-hour map");
  const double beta = params.beta();
  std::vector<double> w_star(kExposureHours);
  for (int t = 1; t <= kExposureHours; ++t) {
    w_star[t - 1] = t < kDemotionHour ? std::pow(beta, t - 1) : std::pow(beta, t - kDemotionHour);
  }
  const auto w = circadian::reverse_redistribute(w_star, map);

  PredictionResult r;
  r.method = Method::v1_and_v25;
  r.v1 = v1;
  r.v25 = v25;
  r.v_hat.resize(kExposureHours);
  const double day_one = v1 / w[0];
  const double later = v25 / w[kDay];
  for (std::size_t t = 0; t < w.size(); ++t) r.v_hat[t] = (t < kDay ? day_one : later) * w[t];
  return r;
}

ErrorReport error_report(const PredictionResult& prediction, const ArticleExposure& observed) {
  const auto v = observed.as_doubles();
  if (prediction.v_hat.size() != v.size()) throw DataError("prediction and observation lengths differ");
  ErrorReport rep;
  rep.normalized.resize(v.size());
  rep.absolute.resize(v.size());
  for (std::size_t t = 0; t < v.size(); ++t) {
    const double diff = prediction.v_hat[t] - v[t];
    rep.absolute[t] = diff;
    if (v[t] > 0.0) {
      rep.normalized[t] = diff / v[t];
    } else {
      ++rep.undefined;
    }
  }
  if (prediction.band_low && prediction.band_high) {
    std::size_t inside = 0, total = 0;
    for (int t = kDemotionHour; t <= kFitHorizon; ++t) {
      const auto i = static_cast<std::size_t>(t - 1);
      ++total;
      if (v[i] >= (*prediction.band_low)[i] && v[i] <= (*prediction.band_high)[i]) ++inside;
    }
    rep.coverage = static_cast<double>(inside) / static_cast<double>(total);
  }
  return rep;
}

EnsembleReport evaluate_ensemble(std::span<const ArticleExposure> exposures,
                                 const model::ModelParams& params, const model::GammaLaw& law,
                                 const circadian::RedistributionMap& map, unsigned threads) {
  std::vector<const ArticleExposure*> usable;
  for (const auto& e : exposures) {
    if (e.complete() && e.v(1) > 0 && e.v(kDemotionHour) > 0) usable.push_back(&e);
  }
  if (usable.empty()) throw DataError("no complete exposures with positive v1 and v25 to evaluate");

  struct PerArticle {
    ErrorReport v1_only;
    ErrorReport v1_and_v25;
    PredictionResult band;
  };
  std::vector<PerArticle> per(usable.size());
  parallel_for(usable.size(), threads, [&](std::size_t i) {
    const auto& e = *usable[i];
    const double v1 = static_cast<double>(e.v(1));
    const double v25 = static_cast<double>(e.v(kDemotionHour));
    per[i].band = predict_from_v1(v1, params, law, map);
    per[i].v1_only = error_report(per[i].band, e);
    per[i].v1_and_v25 = error_report(predict_with_v25(v1, v25, params, map), e);
  });

  EnsembleReport report;
  report.articles = usable.size();
  report.v1_only.resize(kExposureHours);
  report.v1_and_v25.resize(kExposureHours);

  auto summarize = [&](std::vector<HourSummary>& out, auto pick) {
    std::vector<double> pooled;
    for (std::size_t t = 0; t < static_cast<std::size_t>(kExposureHours); ++t) {
      std::vector<double> norm, abs_err;
      std::size_t inside = 0, banded = 0;
      for (std::size_t i = 0; i < per.size(); ++i) {
        const ErrorReport& r = pick(per[i]);
        abs_err.push_back(r.absolute[t]);
        if (r.normalized[t]) {
          norm.push_back(*r.normalized[t]);
          if (t + 1 >= static_cast<std::size_t>(kDemotionHour) && t + 1 <= static_cast<std::size_t>(kFitHorizon)) {
            pooled.push_back(std::abs(*r.normalized[t]));
          }
        } else {
          ++report.undefined_entries;
        }
        if (r.coverage) {
          ++banded;
          const double v = static_cast<double>(usable[i]->v(static_cast<int>(t) + 1));
          if (v >= (*per[i].band.band_low)[t] && v <= (*per[i].band.band_high)[t]) ++inside;
        }
      }
      HourSummary& s = out[t];
      s.n = norm.size();
      for (std::size_t q = 0; q < kSummaryQuantiles.size(); ++q) {
        s.normalized_q[q] = norm.empty() ? std::nan("") : stats::quantile(norm, kSummaryQuantiles[q]);
        s.absolute_q[q] = stats::quantile(abs_err, kSummaryQuantiles[q]);
      }
      if (banded > 0 && t + 1 >= static_cast<std::size_t>(kDemotionHour)) {
        s.coverage = static_cast<double>(inside) / static_cast<double>(banded);
      }
    }
    return pooled.empty() ? std::nan("") : stats::quantile(pooled, 0.5);
  };

  report.median_abs_normalized_v1_only =
      summarize(report.v1_only, [](const PerArticle& p) -> const ErrorReport& { return p.v1_only; });
  report.median_abs_normalized_v1_and_v25 = summarize(
      report.v1_and_v25, [](const PerArticle& p) -> const ErrorReport& { return p.v1_and_v25; });

  double cov = 0.0;
  int hours = 0;
  for (int t = kDemotionHour; t <= kFitHorizon; ++t) {
    if (const auto& c = report.v1_only[static_cast<std::size_t>(t - 1)].coverage) {
      cov += *c;
      ++hours;
    }
  }
  report.mean_coverage = hours > 0 ? cov / hours : 0.0;
  return report;
}

}  // namespace pvdecay::predict
