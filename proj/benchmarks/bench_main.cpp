#include <benchmark/benchmark.h>

#include <random>

#include "seizure/bansim.hpp"
#include "seizure/combiner.hpp"
#include "seizure/layers.hpp"
#include "seizure/model.hpp"
#include "seizure/wire.hpp"

using namespace seizure;

namespace {

Tensor random_tensor(std::vector<std::size_t> shape, std::uint64_t seed) {
  Tensor t(std::move(shape));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  for (auto& v : t.values()) v = n(rng);
  return t;
}

void BM_Conv1d(benchmark::State& state) {
  const auto C = static_cast<std::size_t>(state.range(0));
  const auto T = static_cast<std::size_t>(state.range(1));
  ConvBlockParams p;
  p.kernels = random_tensor({C, C, 5}, 1);
  p.bias.assign(C, 0.0);
  const auto x = random_tensor({C, T}, 2);
  for (auto _ : state) benchmark::DoNotOptimize(conv1d_forward(x, p));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(C * C * T * 5));
}
BENCHMARK(BM_Conv1d)->Args({1, 1280})->Args({4, 1280})->Args({19, 1280});

void BM_ModelForward(benchmark::State& state) {
  Architecture a;
  a.channels = static_cast<std::size_t>(state.range(0));
  const auto model = make_model(Sensor::EEG, a, 3);
  const auto x = random_tensor({a.channels, a.input_length}, 4);
  for (auto _ : state) benchmark::DoNotOptimize(model_forward(model, x));
}
BENCHMARK(BM_ModelForward)->Arg(1)->Arg(4)->Arg(19);

void BM_Backward(benchmark::State& state) {
  Architecture a;
  a.channels = 4;
  const auto model = make_model(Sensor::EEG, a, 3);
  std::vector<Tensor> xs;
  std::vector<ExampleRef> batch;
  for (std::size_t i = 0; i < 32; ++i) xs.push_back(random_tensor({4, 1280}, 10 + i));
  for (std::size_t i = 0; i < 32; ++i) batch.push_back({&xs[i], label_from_code(static_cast<int>(i % 5))});
  for (auto _ : state) benchmark::DoNotOptimize(backward(model, batch, FocalLossConfig{}));
}
BENCHMARK(BM_Backward)->Unit(benchmark::kMillisecond);

void BM_EncodeDecode(benchmark::State& state) {
  ProbabilityMessage m;
  m.window_index = 123456;
  m.probs_q = {1000, 2000, 3000, 4000, 0};
  for (auto _ : state) benchmark::DoNotOptimize(decode_message(encode_message(m)));
}
BENCHMARK(BM_EncodeDecode);

void BM_LrForward(benchmark::State& state) {
  CombinerParams p;
  p.W[0][0] = 1.0;
  const auto x = build_input(ClassProbabilities{{0.1, 0.2, 0.3, 0.4, 0.0}},
                             ClassProbabilities{{0.5, 0.5, 0.0, 0.0, 0.0}});
  for (auto _ : state) benchmark::DoNotOptimize(lr_forward(x, p));
}
BENCHMARK(BM_LrForward);

void BM_Simulation(benchmark::State& state) {
  Architecture a;
  a.input_length = 64;
  a.channels = 2;
  const auto eeg = make_model(Sensor::EEG, a, 1);
  a.channels = 1;
  const auto ecg = make_model(Sensor::ECG, a, 2);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<Tensor> ew, cw;
  for (std::size_t i = 0; i < n; ++i) {
    ew.push_back(random_tensor({2, 64}, i));
    cw.push_back(random_tensor({1, 64}, n + i));
  }
  std::vector<WindowPair> pairs;
  for (std::size_t i = 0; i < n; ++i) pairs.push_back({&ew[i], &cw[i]});
  SimConfig cfg;
  cfg.link.loss_probability = 0.2;
  for (auto _ : state) benchmark::DoNotOptimize(run_simulation(cfg, eeg, ecg, CombinerParams{}, pairs));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n));
}
BENCHMARK(BM_Simulation)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
