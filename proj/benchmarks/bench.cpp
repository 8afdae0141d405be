#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "pvdecay/circadian.hpp"
#include "pvdecay/ingest.hpp"
#include "pvdecay/model.hpp"
#include "pvdecay/pipeline.hpp"
#include "pvdecay/simulate.hpp"

using namespace pvdecay;

namespace {

const simulate::SimulatedCorpus& corpus() {
  static const auto c = simulate::simulate_corpus(simulate::SimConfig{});
  return c;
}

void BM_Redistribute(benchmark::State& state) {
  const auto& c = corpus();
  const auto v = c.exposures.front().as_doubles();
  for (auto _ : state) benchmark::DoNotOptimize(circadian::redistribute(v, c.map));
}
BENCHMARK(BM_Redistribute);

void BM_ReverseRedistribute(benchmark::State& state) {
  const auto& c = corpus();
  const auto w = model::curve_w_star(0.9874, 0.2319, kExposureHours);
  for (auto _ : state) benchmark::DoNotOptimize(circadian::reverse_redistribute(w, c.map));
}
BENCHMARK(BM_ReverseRedistribute);

void BM_MapFromProfile(benchmark::State& state) {
  const auto profile = circadian::CircadianProfile::make(simulate::sinusoidal_profile(2.5e5, 0.3), 0.162);
  for (auto _ : state) benchmark::DoNotOptimize(circadian::RedistributionMap::from_profile(profile));
}
BENCHMARK(BM_MapFromProfile);

void BM_OptimizeC(benchmark::State& state) {
  const auto& c = corpus();
  const auto m = circadian::compute_profile(c.front_page);
  const auto mean = circadian::mean_series(c.exposures);
  for (auto _ : state) benchmark::DoNotOptimize(circadian::optimize_c(m, mean));
}
BENCHMARK(BM_OptimizeC)->Unit(benchmark::kMillisecond);

void BM_EstimateBetaGamma(benchmark::State& state) {
  const auto& c = corpus();
  const auto v_star = pipeline::redistribute_all(c.exposures, c.map);
  for (auto _ : state) benchmark::DoNotOptimize(model::estimate_beta_gamma(v_star));
}
BENCHMARK(BM_EstimateBetaGamma)->Unit(benchmark::kMicrosecond);

void BM_FitCorpus(benchmark::State& state) {
  const auto& c = corpus();
  for (auto _ : state) benchmark::DoNotOptimize(pipeline::fit_corpus(c.exposures, c.map));
}
BENCHMARK(BM_FitCorpus)->Unit(benchmark::kMillisecond);

void BM_SimulateCorpus(benchmark::State& state) {
  simulate::SimConfig config;
  config.n_articles = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate::simulate_corpus(config));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateCorpus)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_ParsePagecountsLine(benchmark::State& state) {
  const std::string line = "en Synthetic_article_0003_(d%27Artagnan) 2060 42188800";
  for (auto _ : state) benchmark::DoNotOptimize(ingest::parse_pagecounts_line(line));
}
BENCHMARK(BM_ParsePagecountsLine);

}  // namespace

BENCHMARK_MAIN();
