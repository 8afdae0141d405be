#include "pvdecay/circadian.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "pvdecay/error.hpp"

namespace pvdecay::circadian {

CircadianProfile CircadianProfile::make(const HourProfile& m, double c) {
  for (double v : m) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DataError("circadian profile must be strictly positive");
  }
  if (!(c >= 0.0 && c < 1.0)) throw DataError("decycling fraction must lie in [0, 1)");
  CircadianProfile p;
  p.m = m;
  p.c = c;
  const double floor = c * *std::min_element(m.begin(), m.end());
  for (std::size_t t = 0; t < m.size(); ++t) p.m_star[t] = m[t] - floor;
  p.t_star = std::accumulate(p.m_star.begin(), p.m_star.end(), 0.0);
  return p;
}

bool CircadianProfile::flat() const {
  return std::adjacent_find(m_star.begin(), m_star.end(), std::not_equal_to<>()) == m_star.end();
}

RedistributionMap RedistributionMap::from_profile(const CircadianProfile& profile) {
  std::array<double, kHoursPerDay + 1> day{};
  if (profile.flat()) {
    for (int j = 0; j <= kHoursPerDay; ++j) day[j] = j;
  } else {
    std::array<double, kHoursPerDay + 1> cum{};
    for (int k = 0; k < kHoursPerDay; ++k) cum[k + 1] = cum[k] + profile.m_star[k];
    int k = 0;
    for (int j = 1; j < kHoursPerDay; ++j) {
      const double target = profile.t_star * j / kHoursPerDay;
      while (k < kHoursPerDay - 1 && cum[k + 1] <= target) ++k;
      day[j] = k + (target - cum[k]) / profile.m_star[k];
    }
    day[kHoursPerDay] = kHoursPerDay;
  }
  std::vector<double> b;
  b.reserve(kExposureHours + 1);
  for (int d = 0; d < kExposureHours / kHoursPerDay; ++d) {
    for (int j = 0; j < kHoursPerDay; ++j) b.push_back(day[j] + d * kHoursPerDay);
  }
  b.push_back(kExposureHours);
  return from_boundaries(std::move(b));
}

RedistributionMap RedistributionMap::from_boundaries(std::vector<double> b) {
  if (b.size() < 2) throw DataError("redistribution map needs at least 2 boundaries");
  const auto n = static_cast<double>(b.size() - 1);
  if (b.front() != 0.0 || b.back() != n) {
    throw DataError("redistribution map must span [0, " + std::to_string(b.size() - 1) + "]");
  }
  for (std::size_t i = 1; i < b.size(); ++i) {
    if (!(b[i] > b[i - 1]) || !std::isfinite(b[i])) {
      throw DataError("redistribution map boundaries must be strictly increasing");
    }
  }
  return RedistributionMap(std::move(b));
}

RedistributionMap RedistributionMap::identity(int hours) {
  std::vector<double> b(static_cast<std::size_t>(hours) + 1);
  std::iota(b.begin(), b.end(), 0.0);
  return RedistributionMap(std::move(b));
}

double PiecewiseTrend::operator()(int t) const {
  if (t == 1) return first;
  if (t >= 2 && t < kDemotionHour) return day_one(t);
  if (t >= kDemotionHour && t <= kExposureHours) return later(t);
  throw DataError("trend evaluated outside hours 1..96");
}

HourProfile compute_profile(const HourlySeries& front_page) {
  HourProfile sum{};
  std::array<std::size_t, kHoursPerDay> n{};
  for (std::size_t i = 0; i < front_page.counts.size(); ++i) {
    const auto& slot = front_page.counts[i];
    if (!slot) continue;
    const int h = (front_page.start + static_cast<std::int64_t>(i)).hour_of_day();
    sum[h] += static_cast<double>(*slot);
    ++n[h];
  }
  HourProfile m{};
  for (int h = 0; h < kHoursPerDay; ++h) {
    if (n[h] == 0) throw DataError("no front-page data for hour " + std::to_string(h) + " UTC");
    m[h] = sum[h] / static_cast<double>(n[h]);
  }
  return m;
}

namespace {

stats::LineFit fit_range(std::span<const double> y, int first_t, int last_t) {
  std::vector<double> xs, ys;
  for (int t = first_t; t <= last_t; ++t) {
    xs.push_back(t);
    ys.push_back(y[static_cast<std::size_t>(t - 1)]);
  }
  return stats::fit_line(xs, ys);
}

}  // namespace

PiecewiseTrend fit_piecewise_trend(std::span<const double> log_values) {
  if (log_values.size() < static_cast<std::size_t>(kFitHorizon)) {
    throw NumericalError("trend fit needs " + std::to_string(kFitHorizon) + " values");
  }
  for (std::size_t i = 0; i < static_cast<std::size_t>(kFitHorizon); ++i) {
    if (!std::isfinite(log_values[i])) {
      throw NumericalError("non-finite log value at hour " + std::to_string(i + 1));
    }
  }
  PiecewiseTrend g;
  g.first = log_values[0];
  g.day_one = fit_range(log_values, 2, kDemotionHour - 1);
  g.later = fit_range(log_values, kDemotionHour, kFitHorizon);
  return g;
}

StageFit stage_r_squared(std::span<const double> log_values) {
  const auto g = fit_piecewise_trend(log_values);
  return {g.day_one.r_squared, g.later.r_squared};
}

std::vector<double> redistribute(std::span<const double> v, const RedistributionMap& map) {
  if (v.size() != static_cast<std::size_t>(map.intervals())) {
    throw DataError("redistribute: series length does not match map");
  }
  std::vector<double> out(v.size(), 0.0);
  map.for_each_overlap([&](int j, int k, double overlap) { out[j] += v[k] * overlap; });
  return out;
}

std::vector<double> redistribute(const ArticleExposure& exposure, const RedistributionMap& map) {
  return redistribute(exposure.as_doubles(), map);
}

std::vector<double> reverse_redistribute(std::span<const double> w_star,
                                         const RedistributionMap& map) {
  if (w_star.size() != static_cast<std::size_t>(map.intervals())) {
    throw DataError("reverse_redistribute: series length does not match map");
  }
  std::vector<double> out(w_star.size(), 0.0);
  map.for_each_overlap(
      [&](int j, int k, double overlap) { out[k] += w_star[j] * overlap / map.length(j); });
  return out;
}

double decycling_objective(const HourProfile& m, std::span<const double> mean_series, double c) {
  const auto map = RedistributionMap::from_profile(CircadianProfile::make(m, c));
  const auto v_star = redistribute(mean_series, map);
  std::vector<double> logs(v_star.size());
  std::transform(v_star.begin(), v_star.end(), logs.begin(), [](double x) { return std::log(x); });
  for (std::size_t i = 0; i < static_cast<std::size_t>(kFitHorizon); ++i) {
    if (!std::isfinite(logs[i])) return std::numeric_limits<double>::quiet_NaN();
  }
  const auto g = fit_piecewise_trend(logs);
  double sum = 0.0;
  for (int t = 1; t <= kFitHorizon; ++t) {
    const double r = logs[static_cast<std::size_t>(t - 1)] - g(t);
    sum += r * r;
  }
  return sum;
}

DecycleResult optimize_c(const HourProfile& m, std::span<const double> mean_series) {
  if (mean_series.size() != static_cast<std::size_t>(kExposureHours)) {
    throw DataError("optimize_c needs a 96-hour mean series");
  }
  auto objective = [&](double c) {
    const double f = decycling_objective(m, mean_series, c);
    if (!std::isfinite(f)) {
      throw NumericalError("decycling objective is not finite at c = " + std::to_string(c));
    }
    return f;
  };
  auto better = [](double f, double best) { return f < best - 1e-12 * (1.0 + std::abs(best)); };

  std::vector<double> grid;
  for (int i = 0; i < 100; ++i) grid.push_back(i / 100.0);
  grid.push_back(kMaxDecyclingFraction);

  std::vector<double> values(grid.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    values[i] = objective(grid[i]);
    if (better(values[i], values[best])) best = i;
  }

  double lo = grid[best == 0 ? 0 : best - 1];
  double hi = grid[std::min(best + 1, grid.size() - 1)];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = objective(x1);
  double f2 = objective(x2);
  while (hi - lo > 1e-4) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = objective(x2);
    }
  }
  double c = grid[best];
  double f = values[best];
  const double refined = 0.5 * (lo + hi);
  if (const double fr = objective(refined); better(fr, f)) {
    c = refined;
    f = fr;
  }

  DecycleResult result;
  result.c = c;
  result.profile = CircadianProfile::make(m, c);
  result.map = RedistributionMap::from_profile(result.profile);
  result.objective = f;
  return result;
}

std::vector<double> mean_series(std::span<const ArticleExposure> exposures) {
  std::vector<double> sum(kExposureHours, 0.0);
  std::size_t n = 0;
  for (const auto& e : exposures) {
    if (!e.complete()) continue;
    for (int t = 0; t < kExposureHours; ++t) sum[t] += static_cast<double>(*e.views[t]);
    ++n;
  }
  if (n == 0) throw DataError("no complete exposures to average");
  for (double& s : sum) s /= static_cast<double>(n);
  return sum;
}

}  // namespace pvdecay::circadian
