#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "advalstm/layers.hpp"
#include "advalstm/objective.hpp"
#include "advalstm/synthetic.hpp"
#include "advalstm/trainer.hpp"

using namespace advalstm;

namespace {

nn::ModelDims dims_for(std::size_t hidden, std::size_t lag) {
  nn::ModelDims d;
  d.mapping = hidden;
  d.hidden = hidden;
  d.lag = lag;
  return d;
}

std::vector<market::Example> batch(std::size_t n, std::size_t lag) {
  synthetic::TwoRegimeSpec spec;
  spec.examples = n;
  spec.lag = lag;
  spec.train_fraction = 1.0;
  spec.validation_fraction = 0.0;
  return synthetic::make_two_regime(spec).train;
}

void BM_Forward(benchmark::State& state) {
  const auto d = dims_for(state.range(0), state.range(1));
  const auto params = nn::ParamSet::initialize(d, 1);
  const auto examples = batch(1, d.lag);
  for (auto _ : state) {
    benchmark::DoNotOptimize(nn::forward(params, examples[0].window).score);
  }
}
BENCHMARK(BM_Forward)->Args({4, 5})->Args({16, 10})->Args({32, 15});

void BM_ForwardBackward(benchmark::State& state) {
  const auto d = dims_for(state.range(0), state.range(1));
  const auto params = nn::ParamSet::initialize(d, 1);
  const auto examples = batch(1, d.lag);
  auto grads = nn::ParamSet::zeros(d);
  for (auto _ : state) {
    const auto trace = nn::forward(params, examples[0].window);
    benchmark::DoNotOptimize(nn::backward(params, trace, 1.0, grads));
  }
}
BENCHMARK(BM_ForwardBackward)->Args({4, 5})->Args({16, 10})->Args({32, 15});

void BM_ObjectiveNormal(benchmark::State& state) {
  const auto d = dims_for(16, 10);
  const auto params = nn::ParamSet::initialize(d, 1);
  const auto examples = batch(state.range(0), d.lag);
  for (auto _ : state) {
    benchmark::DoNotOptimize(train::objective_normal(examples, params, 0.01).loss);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ObjectiveNormal)->Arg(1024);

void BM_ObjectiveAdversarial(benchmark::State& state) {
  const auto d = dims_for(16, 10);
  const auto params = nn::ParamSet::initialize(d, 1);
  const auto examples = batch(state.range(0), d.lag);
  for (auto _ : state) {
    benchmark::DoNotOptimize(train::objective_adversarial(examples, params, 0.01, 0.5, 0.05).loss);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ObjectiveAdversarial)->Arg(1024);

void BM_TrainEpoch(benchmark::State& state) {
  const auto d = dims_for(16, 10);
  const auto examples = batch(4096, d.lag);
  train::TrainConfig config;
  config.epochs = 1;
  config.patience = 0;
  config.mode = state.range(0) ? train::TrainMode::kAdversarial : train::TrainMode::kNormal;
  for (auto _ : state) {
    benchmark::DoNotOptimize(train::train(examples, {}, d, config).best_epoch);
  }
}
BENCHMARK(BM_TrainEpoch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
