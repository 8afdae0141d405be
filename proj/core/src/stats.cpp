#include "pvdecay/stats.hpp"

#include <algorithm>
#include <cmath>

#include "pvdecay/error.hpp"

namespace pvdecay::stats {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw NumericalError("fit_line: size mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw NumericalError("fit_line: need at least 2 points");

  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw NumericalError("fit_line: degenerate design (all x equal)");

  LineFit fit;
  fit.n = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - fit(x[i]);
    fit.residual_ss += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - fit.residual_ss / syy : 1.0;
  return fit;
}

double mean(std::span<const double> values) {
  if (values.empty()) throw NumericalError("mean of empty range");
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double sample_sd(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw NumericalError("pearson: need at least 2 paired values");
  }
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw NumericalError("pearson: zero variance");
  return sxy / std::sqrt(sxx * syy);
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw NumericalError("quantile of empty range");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

}  // namespace pvdecay::stats
