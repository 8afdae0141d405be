#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "pvdecay/series.hpp"

namespace pvdecay::model {

/// Hourly decay factor beta and demotion jump gamma, both in (0, 1].
class ModelParams {
 public:
  /// Throws DataError outside 0 < beta <= 1, 0 < gamma <= 1.
  static ModelParams make(double beta, double gamma);

  double beta() const { return beta_; }
  double gamma() const { return gamma_; }
  /// Poisson rate of first visits per redistributed hour.
  double lambda() const { return -std::log(beta_); }

 private:
  ModelParams(double b, double g) : beta_(b), gamma_(g) {}
  double beta_ = 1.0;
  double gamma_ = 1.0;
};

/// log(gamma) = m * log(v1) + log(C), with residual spread sigma.
struct GammaLaw {
  double m = 0.0;
  double C = 1.0;
  double sigma = 0.0;

  double h(double v1) const;
  double gamma(double v1) const { return std::exp(h(v1)); }
};

/// Log-normal law of first-hour views.
struct V1Distribution {
  double mu = 0.0;
  double sigma = 1.0;
};

/// Normalised redistributed-time curve: 1 at t* = 1, beta^(t*-1) through
/// t* = 24 and gamma * beta^(t*-2) afterwards. `horizon` values (<= 96).
std::vector<double> curve_w_star(double beta, double gamma, int horizon = kFitHorizon);
inline std::vector<double> curve_w_star(const ModelParams& p, int horizon = kFitHorizon) {
  return curve_w_star(p.beta(), p.gamma(), horizon);
}

struct Estimate {
  ModelParams params = ModelParams::make(1.0, 1.0);
  std::size_t articles_used = 0;
  std::size_t terms_used = 0;
  /// Log terms dropped because a count was zero.
  std::size_t skipped_terms = 0;
  double objective = 0.0;
};

/// Least squares in log space over t* = 1..95, each article anchored at
/// its own v*_1. Solved through the 2x2 normal equations with the
/// beta <= 1, gamma <= 1 bounds enforced. Throws DataError on an empty
/// corpus and NumericalError on a degenerate design.
Estimate estimate_beta_gamma(std::span<const std::vector<double>> v_star_corpus);

/// Same objective minimised by Nelder-Mead directly over (log beta,
/// log gamma); an independent route for cross-checking.
Estimate estimate_beta_gamma_search(std::span<const std::vector<double>> v_star_corpus);

/// The objective itself, evaluated term by term.
double beta_gamma_objective(std::span<const std::vector<double>> v_star_corpus, double beta,
                            double gamma);

struct GammaEstimate {
  double gamma = 1.0;
  std::size_t terms_used = 0;
  std::size_t skipped_terms = 0;
};

/// Closed-form per-article jump with beta held fixed. Throws DataError
/// when v*_1 or every tail term is zero.
GammaEstimate per_article_gamma(std::span<const double> v_star, double beta);

struct GammaPair {
  double v1 = 0.0;
  double gamma = 0.0;
};

struct OutlierRule {
  bool enabled = true;
  double threshold_sigma = 3.0;
  int max_rounds = 2;
};

struct GammaLawFit {
  GammaLaw law;
  std::vector<std::size_t> outliers;  // indices into the input
  std::size_t n_used = 0;
};

/// OLS of log gamma on log v1 after iterated residual trimming.
GammaLawFit fit_gamma_law(std::span<const GammaPair> pairs, const OutlierRule& rule = {});

struct LogInterval {
  double low = 0.0;
  double high = 0.0;
};

/// [h(v1) - sigma, h(v1) + sigma] on log gamma.
LogInterval gamma_interval(const GammaLaw& law, double v1);

double corr_log_v1_log_gamma(std::span<const GammaPair> pairs);

/// Mean and sample standard deviation of log v1.
V1Distribution fit_v1_distribution(std::span<const double> v1);

}  // namespace pvdecay::model
