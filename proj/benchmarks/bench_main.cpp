#include <benchmark/benchmark.h>

#include "hbml/distributions.hpp"
#include "hbml/hbsampler.hpp"
#include "hbml/simulate.hpp"

namespace {

hbml::SimulationSpec bench_sim(std::size_t persons) {
  hbml::SimulationSpec sim;
  sim.persons = persons;
  sim.occasions = 8;
  sim.alternatives = 3;
  sim.b = hbml::Vector(2);
  sim.b << 1.0, -0.5;
  sim.w = hbml::Matrix(2, 2);
  sim.w << 0.5, 0.1, 0.1, 0.3;
  sim.alpha = hbml::Vector::Constant(1, 0.8);
  sim.seed = 1;
  return sim;
}

void BM_PersonLoglik(benchmark::State& state) {
  const auto sim = hbml::simulate(bench_sim(50));
  const hbml::ChoiceModel model(sim.data, sim.spec);
  hbml::Vector beta(2);
  beta << 0.9, -0.4;
  const hbml::Vector alpha = hbml::Vector::Constant(1, 0.8);
  std::size_t n = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.person_loglik(n, beta, alpha));
    n = (n + 1) % model.n_persons();
  }
}
BENCHMARK(BM_PersonLoglik);

void BM_InverseWishart(benchmark::State& state) {
  const auto k = state.range(0);
  const auto scale = hbml::SpdMatrix::identity(k);
  hbml::RngStream rng(3, {hbml::StreamTag::Test, 0, 0});
  for (auto _ : state) {
    benchmark::DoNotOptimize(hbml::invwishart_sample(static_cast<double>(k + 300), scale, rng));
  }
}
BENCHMARK(BM_InverseWishart)->Arg(2)->Arg(5)->Arg(10);

void BM_Chain(benchmark::State& state) {
  const auto sim = hbml::simulate(bench_sim(static_cast<std::size_t>(state.range(0))));
  hbml::SamplerConfig config;
  config.draws = 200;
  config.threads = static_cast<unsigned>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(hbml::run_chain(sim.data, sim.spec, config));
  }
}
BENCHMARK(BM_Chain)->Args({100, 1})->Args({100, 2})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
