#include <doctest.h>

#include <cmath>

#include "pvdecay/error.hpp"
#include "pvdecay/predict.hpp"
#include "pvdecay/simulate.hpp"
#include "support.hpp"

using namespace pvdecay;
using namespace pvdecay::predict;

namespace {

const auto kFlat = circadian::RedistributionMap::identity();
const model::GammaLaw kLaw{-0.132, 0.862, 0.2};

ArticleExposure exposure_from(const std::vector<double>& v) {
  ArticleExposure e;
  for (std::size_t t = 0; t < v.size(); ++t) e.views[t] = static_cast<Count>(std::llround(v[t]));
  return e;
}

}  // namespace

TEST_SUITE("predict") {
  TEST_CASE("constant prediction when nothing decays") {
    const auto r = predict_from_v1(750.0, model::ModelParams::make(1.0, 1.0), model::GammaLaw{0.0, 1.0, 0.0}, kFlat);
    REQUIRE(r.v_hat.size() == 96);
    for (double v : r.v_hat) CHECK(v == 750.0);
  }

  TEST_CASE("first hour equals v1 under any map") {
    testing::Gen gen(81);
    for (int i = 0; i < 50; ++i) {
      const double v1 = gen.uniform(1, 1e5);
      const auto r = predict_from_v1(v1, model::ModelParams::make(gen.uniform(0.9, 1.0), 0.5), kLaw, gen.map());
      CHECK(r.v_hat[0] == doctest::Approx(v1).epsilon(1e-14));
    }
  }

  TEST_CASE("flat profile hour 25 value") {
    const auto r = predict_from_v1(1000.0, model::ModelParams::make(0.9874, 0.2319), model::GammaLaw{0.0, 0.2319, 0.1}, kFlat);
    CHECK(r.v_hat[24] == doctest::Approx(1000.0 * 0.2319 * std::pow(0.9874, 23)).epsilon(1e-12));
    CHECK(r.v_hat[24] == doctest::Approx(173.2).epsilon(1e-3));
  }

  TEST_CASE("band brackets the prediction and agrees before demotion") {
    testing::Gen gen(82);
    for (int i = 0; i < 30; ++i) {
      const auto r = predict_from_v1(gen.uniform(10, 1e4), model::ModelParams::make(0.9874, 0.2319), kLaw, gen.map());
      for (std::size_t t = 0; t < 96; ++t) {
        CHECK((*r.band_low)[t] <= r.v_hat[t] * (1 + 1e-12));
        CHECK(r.v_hat[t] <= (*r.band_high)[t] * (1 + 1e-12));
        if (t < 24) {
          CHECK((*r.band_low)[t] == doctest::Approx(r.v_hat[t]).epsilon(1e-12));
          CHECK((*r.band_high)[t] == doctest::Approx(r.v_hat[t]).epsilon(1e-12));
        }
        CHECK(r.v_hat[t] >= 0.0);
      }
    }
  }

  TEST_CASE("re-anchoring on the model's own v25 changes nothing") {
    const auto params = model::ModelParams::make(0.9874, 0.2319);
    const auto a = predict_from_v1(1000.0, params, kLaw, kFlat);
    const auto b = predict_with_v25(1000.0, a.v_hat[24], params, kFlat);
    for (std::size_t t = 0; t < 96; ++t) CHECK(b.v_hat[t] == doctest::Approx(a.v_hat[t]).epsilon(1e-9));
    CHECK(b.v_hat[25] / b.v_hat[24] == doctest::Approx(0.9874).epsilon(1e-14));
    CHECK_FALSE(b.band_low.has_value());
  }

  TEST_CASE("both predictors agree on day one") {
    testing::Gen gen(83);
    for (int i = 0; i < 50; ++i) {
      const auto map = gen.map();
      const auto params = model::ModelParams::make(gen.uniform(0.95, 1.0), 0.3);
      const double v1 = gen.uniform(10, 1e4);
      const auto a = predict_from_v1(v1, params, kLaw, map);
      const auto b = predict_with_v25(v1, gen.uniform(1, 1e3), params, map);
      for (std::size_t t = 0; t < 24; ++t) CHECK(a.v_hat[t] == b.v_hat[t]);
    }
  }

  TEST_CASE("scaling v1 scales day one linearly and later hours by k^(1+m)") {
    testing::Gen gen(84);
    const auto params = model::ModelParams::make(0.9874, 0.2319);
    for (int i = 0; i < 20; ++i) {
      const auto map = gen.map();
      const double v1 = gen.uniform(100, 5000), k = gen.uniform(1.5, 10);
      const auto a = predict_from_v1(v1, params, kLaw, map);
      const auto b = predict_from_v1(v1 * k, params, kLaw, map);
      for (std::size_t t = 0; t < 24; ++t) CHECK(b.v_hat[t] == doctest::Approx(k * a.v_hat[t]).epsilon(1e-12));
      for (std::size_t t = 24; t < 96; ++t) {
        CHECK(std::log(b.v_hat[t] / a.v_hat[t]) / std::log(k) == doctest::Approx(1.0 + kLaw.m).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("flat-profile totals follow the geometric sums") {
    const double beta = 0.98, v1 = 400.0;
    const model::GammaLaw law{0.0, 0.4, 0.0};
    const auto r = predict_from_v1(v1, model::ModelParams::make(beta, 0.4), law, kFlat);
    double first = 0, later = 0;
    for (int t = 0; t < 24; ++t) first += r.v_hat[t];
    for (int t = 24; t < 95; ++t) later += r.v_hat[t];
    CHECK(first == doctest::Approx(v1 * (1 - std::pow(beta, 24)) / (1 - beta)).epsilon(1e-12));
    CHECK(later == doctest::Approx(v1 * 0.4 * std::pow(beta, 23) * (1 - std::pow(beta, 71)) / (1 - beta)).epsilon(1e-12));
  }

  TEST_CASE("input validation") {
    const auto p = model::ModelParams::make(0.98, 0.3);
    CHECK_THROWS_AS(predict_from_v1(0.0, p, kLaw, kFlat), DataError);
    CHECK_THROWS_AS(predict_from_v1(-3.0, p, kLaw, kFlat), DataError);
    CHECK_THROWS_AS(predict_with_v25(10.0, 0.0, p, kFlat), DataError);
    CHECK_THROWS_AS(predict_from_v1(10.0, p, kLaw, circadian::RedistributionMap::identity(48)), DataError);
  }

  TEST_CASE("error_report of a perfect prediction") {
    std::vector<double> v(96);
    for (std::size_t t = 0; t < 96; ++t) v[t] = 1000.0 - 5.0 * static_cast<double>(t);
    PredictionResult p;
    p.v_hat = v;
    p.band_low = v;
    p.band_high = v;
    const auto r = error_report(p, exposure_from(v));
    for (const auto& e : r.normalized) CHECK(*e == 0.0);
    for (double e : r.absolute) CHECK(e == 0.0);
    CHECK(r.coverage == 1.0);
    CHECK(r.undefined == 0);
  }

  TEST_CASE("error_report of a doubled prediction") {
    std::vector<double> v(96, 50.0);
    v[40] = 0.0;
    PredictionResult p;
    for (double x : v) p.v_hat.push_back(2 * x);
    const auto r = error_report(p, exposure_from(v));
    CHECK(r.undefined == 1);
    CHECK_FALSE(r.normalized[40].has_value());
    CHECK(*r.normalized[3] == 1.0);
    CHECK(r.absolute[3] == 50.0);
    CHECK_FALSE(r.coverage.has_value());
    ArticleExposure incomplete = exposure_from(v);
    incomplete.views[7].reset();
    CHECK_THROWS_AS(error_report(p, incomplete), DataError);
  }

  TEST_CASE("coverage never shrinks as sigma grows") {
    simulate::SimConfig config;
    config.n_articles = 60;
    const auto corpus = simulate::simulate_corpus(config);
    double previous = -1.0;
    for (double sigma : {0.0, 0.05, 0.1, 0.2, 0.4, 0.8}) {
      const model::GammaLaw law{config.law.m, config.law.C, sigma};
      const auto r = evaluate_ensemble(corpus.exposures, config.params, law, corpus.map);
      CHECK(r.mean_coverage >= previous);
      previous = r.mean_coverage;
    }
    CHECK(previous > 0.9);
  }

  TEST_CASE("v1+v25 beats v1 alone on a simulated ensemble") {
    simulate::SimConfig config;
    config.n_articles = 100;
    config.seed = 7;
    const auto corpus = simulate::simulate_corpus(config);
    const auto r = evaluate_ensemble(corpus.exposures, config.params, config.law, corpus.map, 2);
    CHECK(r.articles == 100);
    CHECK(r.median_abs_normalized_v1_and_v25 <= r.median_abs_normalized_v1_only);
    REQUIRE(r.v1_only.size() == 96);
    CHECK(r.v1_and_v25[24].normalized_q[2] == 0.0);
  }

  TEST_CASE("ensemble summaries do not depend on thread count") {
    simulate::SimConfig config;
    config.n_articles = 40;
    const auto corpus = simulate::simulate_corpus(config);
    const auto a = evaluate_ensemble(corpus.exposures, config.params, config.law, corpus.map, 1);
    const auto b = evaluate_ensemble(corpus.exposures, config.params, config.law, corpus.map, 5);
    CHECK(a.median_abs_normalized_v1_only == b.median_abs_normalized_v1_only);
    CHECK(a.mean_coverage == b.mean_coverage);
    for (std::size_t h = 0; h < 96; ++h) CHECK(a.v1_only[h].normalized_q == b.v1_only[h].normalized_q);
  }
}
