#include "pvdecay/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "pvdecay/error.hpp"
#include "pvdecay/stats.hpp"

namespace pvdecay::model {

ModelParams ModelParams::make(double beta, double gamma) {
  if (!(beta > 0.0 && beta <= 1.0)) throw DataError("beta must lie in (0, 1], got " + std::to_string(beta));
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw DataError("gamma must lie in (0, 1], got " + std::to_string(gamma));
  }
  return ModelParams(beta, gamma);
}

double GammaLaw::h(double v1) const {
  if (!(v1 > 0.0)) throw DataError("v1 must be positive");
  return m * std::log(v1) + std::log(C);
}

std::vector<double> curve_w_star(double beta, double gamma, int horizon) {
  if (horizon < 1 || horizon > kExposureHours) throw DataError("curve horizon must lie in 1..96");
  std::vector<double> w(static_cast<std::size_t>(horizon));
  for (int t = 1; t <= horizon; ++t) {
    w[t - 1] = t < kDemotionHour ? std::pow(beta, t - 1) : gamma * std::pow(beta, t - 2);
  }
  return w;
}

namespace {

// Regressors of log(w_t) = x1 * log(beta) + x2 * log(gamma).
struct Design {
  double x1;
  double x2;
};

constexpr Design design(int t) {
  return t < kDemotionHour ? Design{static_cast<double>(t - 1), 0.0}
                           : Design{static_cast<double>(t - 2), 1.0};
}

void check_series(const std::vector<double>& s) {
  if (s.size() < static_cast<std::size_t>(kFitHorizon)) {
    throw DataError("redistributed series needs at least " + std::to_string(kFitHorizon) + " values");
  }
}

}  // namespace

double beta_gamma_objective(std::span<const std::vector<double>> corpus, double beta,
                            double gamma) {
  const double lb = std::log(beta);
  const double lg = std::log(gamma);
  double sum = 0.0;
  for (const auto& s : corpus) {
    check_series(s);
    if (!(s[0] > 0.0)) continue;
    const double anchor = std::log(s[0]);
    for (int t = 2; t <= kFitHorizon; ++t) {
      const double v = s[t - 1];
      if (!(v > 0.0)) continue;
      const double model = t < kDemotionHour ? anchor + (t - 1) * lb : anchor + lg + (t - 2) * lb;
      const double r = model - std::log(v);
      sum += r * r;
    }
  }
  return sum;
}

Estimate estimate_beta_gamma(std::span<const std::vector<double>> corpus) {
  if (corpus.empty()) throw DataError("cannot estimate parameters from an empty corpus");
  double s11 = 0.0, s12 = 0.0, s22 = 0.0, sy1 = 0.0, sy2 = 0.0, syy = 0.0;
  Estimate est;
  for (const auto& s : corpus) {
    check_series(s);
    if (!(s[0] > 0.0)) {
      est.skipped_terms += kFitHorizon;
      continue;
    }
    ++est.articles_used;
    ++est.terms_used;
    const double anchor = std::log(s[0]);
    for (int t = 2; t <= kFitHorizon; ++t) {
      const double v = s[t - 1];
      if (!(v > 0.0)) {
        ++est.skipped_terms;
        continue;
      }
      ++est.terms_used;
      const auto [x1, x2] = design(t);
      const double y = std::log(v) - anchor;
      s11 += x1 * x1;
      s12 += x1 * x2;
      s22 += x2 * x2;
      sy1 += x1 * y;
      sy2 += x2 * y;
      syy += y * y;
    }
  }
  const double det = s11 * s22 - s12 * s12;
  if (est.articles_used == 0 || s22 == 0.0 || !(det > 1e-12 * s11 * s22)) {
    throw NumericalError("degenerate design: need positive counts on both sides of the demotion");
  }

  auto quad = [&](double b, double g) {
    return syy - 2.0 * b * sy1 - 2.0 * g * sy2 + b * b * s11 + 2.0 * b * g * s12 + g * g * s22;
  };
  double b = (s22 * sy1 - s12 * sy2) / det;
  double g = (s11 * sy2 - s12 * sy1) / det;
  if (b > 0.0 || g > 0.0) {
    // Box-constrained optimum lies on a face or at the corner.
    const std::array<std::pair<double, double>, 3> candidates{{
        {0.0, std::min(0.0, sy2 / s22)},
        {std::min(0.0, sy1 / s11), 0.0},
        {0.0, 0.0},
    }};
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [cb, cg] : candidates) {
      if (const double q = quad(cb, cg); q < best) {
        best = q;
        b = cb;
        g = cg;
      }
    }
  }
  est.params = ModelParams::make(std::exp(b), std::exp(g));
  est.objective = beta_gamma_objective(corpus, est.params.beta(), est.params.gamma());
  return est;
}

Estimate estimate_beta_gamma_search(std::span<const std::vector<double>> corpus) {
  if (corpus.empty()) throw DataError("cannot estimate parameters from an empty corpus");
  auto f = [&](const std::array<double, 2>& p) {
    return beta_gamma_objective(corpus, std::exp(std::min(p[0], 0.0)), std::exp(std::min(p[1], 0.0)));
  };

  std::array<std::array<double, 2>, 3> simplex{{{std::log(0.99), std::log(0.5)},
                                                {std::log(0.99) + 0.01, std::log(0.5)},
                                                {std::log(0.99), std::log(0.5) + 0.1}}};
  std::array<double, 3> fv{};
  for (int i = 0; i < 3; ++i) fv[i] = f(simplex[i]);

  for (int iter = 0; iter < 20000; ++iter) {
    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    const auto best = simplex[order[0]], mid = simplex[order[1]], worst = simplex[order[2]];
    const double fb = fv[order[0]], fm = fv[order[1]], fw = fv[order[2]];

    double diameter = 0.0;
    for (int i = 1; i < 3; ++i) {
      diameter = std::max({diameter, std::abs(simplex[order[i]][0] - best[0]),
                           std::abs(simplex[order[i]][1] - best[1])});
    }
    if (diameter < 1e-13 && fw - fb <= 1e-14 * (1.0 + std::abs(fb))) break;

    const std::array<double, 2> centroid{(best[0] + mid[0]) / 2.0, (best[1] + mid[1]) / 2.0};
    auto along = [&](double k) {
      return std::array<double, 2>{centroid[0] + k * (worst[0] - centroid[0]),
                                   centroid[1] + k * (worst[1] - centroid[1])};
    };
    const auto reflected = along(-1.0);
    const double fr = f(reflected);
    std::array<double, 2> next;
    double fnext;
    if (fr < fb) {
      const auto expanded = along(-2.0);
      const double fe = f(expanded);
      next = fe < fr ? expanded : reflected;
      fnext = std::min(fe, fr);
    } else if (fr < fm) {
      next = reflected;
      fnext = fr;
    } else {
      const auto contracted = fr < fw ? along(-0.5) : along(0.5);
      const double fc = f(contracted);
      if (fc < std::min(fr, fw)) {
        next = contracted;
        fnext = fc;
      } else {
        for (int i = 1; i < 3; ++i) {
          auto& p = simplex[order[i]];
          p = {best[0] + 0.5 * (p[0] - best[0]), best[1] + 0.5 * (p[1] - best[1])};
          fv[order[i]] = f(p);
        }
        continue;
      }
    }
    simplex[order[2]] = next;
    fv[order[2]] = fnext;
  }

  const auto best_it = std::min_element(fv.begin(), fv.end());
  const auto& p = simplex[static_cast<std::size_t>(best_it - fv.begin())];
  Estimate est;
  est.params = ModelParams::make(std::exp(std::min(p[0], 0.0)), std::exp(std::min(p[1], 0.0)));
  est.objective = *best_it;
  for (const auto& s : corpus) {
    if (!(s[0] > 0.0)) {
      est.skipped_terms += kFitHorizon;
      continue;
    }
    ++est.articles_used;
    ++est.terms_used;
    for (int t = 2; t <= kFitHorizon; ++t) (s[t - 1] > 0.0 ? est.terms_used : est.skipped_terms) += 1;
  }
  return est;
}

GammaEstimate per_article_gamma(std::span<const double> v_star, double beta) {
  if (v_star.size() < static_cast<std::size_t>(kFitHorizon)) {
    throw DataError("per_article_gamma needs " + std::to_string(kFitHorizon) + " values");
  }
  if (!(beta > 0.0)) throw DataError("beta must be positive");
  if (!(v_star[0] > 0.0)) throw DataError("per_article_gamma: v*_1 is zero");
  const double anchor = std::log(v_star[0]);
  const double lb = std::log(beta);
  GammaEstimate est;
  double sum = 0.0;
  for (int t = kDemotionHour; t <= kFitHorizon; ++t) {
    const double v = v_star[t - 1];
    if (!(v > 0.0)) {
      ++est.skipped_terms;
      continue;
    }
    sum += std::log(v) - anchor - (t - 2) * lb;
    ++est.terms_used;
  }
  if (est.terms_used == 0) throw DataError("per_article_gamma: no positive counts after demotion");
  est.gamma = std::exp(sum / static_cast<double>(est.terms_used));
  return est;
}

GammaLawFit fit_gamma_law(std::span<const GammaPair> pairs, const OutlierRule& rule) {
  std::vector<double> x, y;
  for (const auto& p : pairs) {
    if (!(p.v1 > 0.0) || !(p.gamma > 0.0)) throw DataError("gamma law pairs must be positive");
    x.push_back(std::log(p.v1));
    y.push_back(std::log(p.gamma));
  }
  std::vector<std::size_t> kept(pairs.size());
  for (std::size_t i = 0; i < kept.size(); ++i) kept[i] = i;

  GammaLawFit out;
  auto fit_kept = [&] {
    if (kept.size() < 3) throw DataError("gamma law needs at least 3 pairs after outlier removal");
    std::vector<double> kx, ky;
    for (auto i : kept) {
      kx.push_back(x[i]);
      ky.push_back(y[i]);
    }
    const auto line = stats::fit_line(kx, ky);
    std::vector<double> residuals;
    for (auto i : kept) residuals.push_back(y[i] - line(x[i]));
    return std::pair{line, stats::sample_sd(residuals)};
  };

  auto [line, sigma] = fit_kept();
  for (int round = 0; rule.enabled && round < rule.max_rounds; ++round) {
    std::vector<std::size_t> next;
    for (auto i : kept) {
      if (std::abs(y[i] - line(x[i])) > rule.threshold_sigma * sigma) {
        out.outliers.push_back(i);
      } else {
        next.push_back(i);
      }
    }
    if (next.size() == kept.size()) break;
    kept = std::move(next);
    std::tie(line, sigma) = fit_kept();
  }
  std::sort(out.outliers.begin(), out.outliers.end());
  out.law = GammaLaw{line.slope, std::exp(line.intercept), sigma};
  out.n_used = kept.size();
  return out;
}

LogInterval gamma_interval(const GammaLaw& law, double v1) {
  const double center = law.h(v1);
  return {center - law.sigma, center + law.sigma};
}

double corr_log_v1_log_gamma(std::span<const GammaPair> pairs) {
  std::vector<double> x, y;
  for (const auto& p : pairs) {
    if (!(p.v1 > 0.0) || !(p.gamma > 0.0)) throw DataError("correlation pairs must be positive");
    x.push_back(std::log(p.v1));
    y.push_back(std::log(p.gamma));
  }
  return stats::pearson(x, y);
}

V1Distribution fit_v1_distribution(std::span<const double> v1) {
  std::vector<double> logs;
  for (double v : v1) {
    if (!(v > 0.0)) throw DataError("v1 values must be positive");
    logs.push_back(std::log(v));
  }
  if (logs.size() < 2) throw NumericalError("v1 distribution needs at least 2 values");
  const V1Distribution d{stats::mean(logs), stats::sample_sd(logs)};
  if (!(d.sigma > 0.0)) throw NumericalError("v1 values have zero spread; log-normal fit undefined");
  return d;
}

}  // namespace pvdecay::model
