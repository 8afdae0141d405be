#include "pvdecay/pipeline.hpp"

#include <algorithm>

#include "pvdecay/error.hpp"
#include "pvdecay/parallel.hpp"

namespace pvdecay::pipeline {

std::vector<ArticleExposure> complete_only(std::span<const ArticleExposure> exposures) {
  std::vector<ArticleExposure> out;
  for (const auto& e : exposures) {
    if (e.complete()) out.push_back(e);
  }
  return out;
}

std::vector<ArticleExposure> first_n(std::span<const ArticleExposure> exposures, std::size_t n) {
  const auto k = std::min(n, exposures.size());
  return {exposures.begin(), exposures.begin() + static_cast<std::ptrdiff_t>(k)};
}

std::vector<ArticleExposure> after_first_n(std::span<const ArticleExposure> exposures, std::size_t n) {
  const auto k = std::min(n, exposures.size());
  return {exposures.begin() + static_cast<std::ptrdiff_t>(k), exposures.end()};
}

std::vector<std::vector<double>> redistribute_all(std::span<const ArticleExposure> exposures,
                                                  const circadian::RedistributionMap& map,
                                                  unsigned threads) {
  std::vector<std::vector<double>> out(exposures.size());
  parallel_for(exposures.size(), threads,
               [&](std::size_t i) { out[i] = circadian::redistribute(exposures[i], map); });
  return out;
}

artifacts::FittedParams fit_corpus(std::span<const ArticleExposure> exposures,
                                   const circadian::RedistributionMap& map,
                                   const model::OutlierRule& rule,
                                   std::optional<std::size_t> first_n, unsigned threads) {
  if (exposures.empty()) throw DataError("no complete exposures to fit");
  const auto v_star = redistribute_all(exposures, map, threads);
  const auto estimate = model::estimate_beta_gamma(v_star);
  const double beta = estimate.params.beta();

  std::vector<model::GammaPair> pairs;
  std::vector<std::size_t> pair_article;
  std::vector<double> v1s;
  for (std::size_t i = 0; i < exposures.size(); ++i) {
    const auto v1 = static_cast<double>(exposures[i].v(1));
    if (v1 <= 0.0) continue;
    v1s.push_back(v1);
    try {
      pairs.push_back({v1, model::per_article_gamma(v_star[i], beta).gamma});
      pair_article.push_back(i);
    } catch (const DataError&) {
    }
  }

  const auto law_fit = model::fit_gamma_law(pairs, rule);
  artifacts::FittedParams p;
  p.params = estimate.params;
  p.law = law_fit.law;
  p.v1_dist = model::fit_v1_distribution(v1s);
  p.n_articles = exposures.size();
  p.first_n = first_n;
  p.skipped_terms = estimate.skipped_terms;
  p.objective = estimate.objective;
  for (auto idx : law_fit.outliers) p.outliers_removed.push_back(exposures[pair_article[idx]].title);

  std::vector<model::GammaPair> kept;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (!std::binary_search(law_fit.outliers.begin(), law_fit.outliers.end(), k)) kept.push_back(pairs[k]);
  }
  p.pearson = model::corr_log_v1_log_gamma(kept);
  return p;
}

}  // namespace pvdecay::pipeline
