#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pvdecay/artifacts.hpp"
#include "pvdecay/circadian.hpp"
#include "pvdecay/model.hpp"
#include "pvdecay/series.hpp"

// Multi-step workflows shared by the CLI and the acceptance suite.
namespace pvdecay::pipeline {

/// Complete exposures in promotion order.
std::vector<ArticleExposure> complete_only(std::span<const ArticleExposure> exposures);

/// First `n` exposures by promotion date, and the rest.
std::vector<ArticleExposure> first_n(std::span<const ArticleExposure> exposures, std::size_t n);
std::vector<ArticleExposure> after_first_n(std::span<const ArticleExposure> exposures, std::size_t n);

/// Redistributes every exposure through `map`.
std::vector<std::vector<double>> redistribute_all(std::span<const ArticleExposure> exposures,
                                                  const circadian::RedistributionMap& map,
                                                  unsigned threads = 1);

/// beta and gamma from the pooled fit, per-article jumps at that beta, the
/// gamma law over (observed v1, jump) pairs and the v1 log-normal fit.
/// Articles with v1 = 0 or no usable tail are left out of the law.
/// `exposures` must be complete; `first_n` is only recorded.
artifacts::FittedParams fit_corpus(std::span<const ArticleExposure> exposures,
                                   const circadian::RedistributionMap& map,
                                   const model::OutlierRule& rule = {},
                                   std::optional<std::size_t> first_n = std::nullopt,
                                   unsigned threads = 1);

}  // namespace pvdecay::pipeline
