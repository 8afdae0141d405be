#pragma once

#include <algorithm>
#include <array>
#include <span>
#include <vector>

#include "pvdecay/series.hpp"
#include "pvdecay/stats.hpp"

namespace pvdecay::circadian {

using HourProfile = std::array<double, kHoursPerDay>;

/// Mean front-page views per UTC hour of day, with a fraction `c` of the
/// minimum removed ("decycled").
struct CircadianProfile {
  HourProfile m{};
  double c = 0.0;
  HourProfile m_star{};
  double t_star = 0.0;

  /// Validates m > 0 and 0 <= c < 1, then derives m_star and t_star.
  static CircadianProfile make(const HourProfile& m, double c = 0.0);
  bool flat() const;
};

/// Boundaries of equal decycled-mass intervals in real time. Interval j
/// (0-based) spans [boundaries[j], boundaries[j+1]] real hours from the
/// start of the window. A window of N hours has N + 1 boundaries with
/// boundaries.front() == 0 and boundaries.back() == N.
class RedistributionMap {
 public:
  /// The 96-hour map of a profile. Day boundaries fall exactly on 24, 48 and 72.
  static RedistributionMap from_profile(const CircadianProfile& profile);
  /// Validates and adopts arbitrary boundaries (strictly increasing, 0..N).
  static RedistributionMap from_boundaries(std::vector<double> boundaries);
  static RedistributionMap identity(int hours = kExposureHours);

  int intervals() const { return static_cast<int>(boundaries_.size()) - 1; }
  const std::vector<double>& boundaries() const { return boundaries_; }
  double length(int j) const { return boundaries_[j + 1] - boundaries_[j]; }

  /// Calls fn(j, k, overlap) for every redistributed interval j and real hour
  /// k whose intersection has positive length, in increasing (j, k) order.
  template <typename Fn>
  void for_each_overlap(Fn&& fn) const {
    const int n = intervals();
    int j = 0, k = 0;
    while (j < n && k < n) {
      const double lo = std::max(boundaries_[j], static_cast<double>(k));
      const double hi = std::min(boundaries_[j + 1], static_cast<double>(k + 1));
      if (hi > lo) fn(j, k, hi - lo);
      if (boundaries_[j + 1] < static_cast<double>(k + 1)) {
        ++j;
      } else if (boundaries_[j + 1] > static_cast<double>(k + 1)) {
        ++k;
      } else {
        ++j;
        ++k;
      }
    }
  }

  friend bool operator==(const RedistributionMap&, const RedistributionMap&) = default;

 private:
  explicit RedistributionMap(std::vector<double> b) : boundaries_(std::move(b)) {}
  std::vector<double> boundaries_;
};

/// Piecewise-linear trend g of mean log views over exposure stages: a point
/// value at hour 1, a line on 2..24 and a line on 25..95. The gap between
/// the two lines at 24 -> 25 is the demotion drop.
struct PiecewiseTrend {
  double first = 0.0;
  stats::LineFit day_one;
  stats::LineFit later;

  /// Defined for t in 1..96.
  double operator()(int t) const;
};

/// Means per UTC hour of day over the present slots of `front_page`.
/// Throws DataError if any hour of day has no samples.
HourProfile compute_profile(const HourlySeries& front_page);

/// Fits g on values indexed t = 1..n (n >= 95). Throws NumericalError on
/// non-finite input.
PiecewiseTrend fit_piecewise_trend(std::span<const double> log_values);

/// R^2 of the two linear stages of a fitted trend.
struct StageFit {
  double day_one_r2 = 0.0;
  double later_r2 = 0.0;
};
StageFit stage_r_squared(std::span<const double> log_values);

/// Proportional split: each real hour's views are spread uniformly over its
/// wall-clock span and summed per redistributed interval. Mass-conserving.
std::vector<double> redistribute(std::span<const double> v, const RedistributionMap& map);
/// Throws DataError if the exposure is incomplete.
std::vector<double> redistribute(const ArticleExposure& exposure, const RedistributionMap& map);

/// Spreads each redistributed value uniformly over its interval's
/// wall-clock span and re-bins onto real hours. Mass-conserving.
std::vector<double> reverse_redistribute(std::span<const double> w_star,
                                         const RedistributionMap& map);

struct DecycleResult {
  double c = 0.0;
  CircadianProfile profile;
  RedistributionMap map = RedistributionMap::identity();
  double objective = 0.0;
};

/// Sum over t* = 1..95 of squared deviations between the log of the
/// redistributed series and its own piecewise trend, for fraction c.
double decycling_objective(const HourProfile& m, std::span<const double> mean_series, double c);

inline constexpr double kMaxDecyclingFraction = 0.999;

/// Grid scan of c over [0, 0.999] in 0.01 steps followed by golden-section
/// refinement to 1e-4 around the best grid point. Ties resolve to the
/// smallest c. Throws NumericalError if the objective is non-finite anywhere
/// on the grid.
DecycleResult optimize_c(const HourProfile& m, std::span<const double> mean_series);

/// Mean hourly views over complete exposures.
std::vector<double> mean_series(std::span<const ArticleExposure> exposures);

}  // namespace pvdecay::circadian
