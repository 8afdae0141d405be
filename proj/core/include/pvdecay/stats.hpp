#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pvdecay::stats {

/// Ordinary least-squares line y = slope * x + intercept.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 1.0;  // 1 when y has zero variance and the fit is exact
  double residual_ss = 0.0;
  std::size_t n = 0;

  double operator()(double x) const { return slope * x + intercept; }
};

/// Throws NumericalError when fewer than two points or all x are equal.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> values);
/// Sample standard deviation (n - 1 denominator); 0 for a single value.
double sample_sd(std::span<const double> values);
/// Throws NumericalError when either side has zero variance.
double pearson(std::span<const double> x, std::span<const double> y);
/// Linear-interpolation quantile (Hyndman-Fan type 7). `values` need not be sorted.
double quantile(std::vector<double> values, double p);

}  // namespace pvdecay::stats
