#include <benchmark/benchmark.h>

#include <random>

#include "aeclab/nn/model.hpp"
#include "aeclab/stft.hpp"

namespace {

using namespace aeclab;
using namespace aeclab::nn;

MatX<float> random_input(Eigen::Index t, Eigen::Index w, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
  MatX<float> m(t, w);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = dist(rng);
  return m;
}

void BM_Stft(benchmark::State& state) {
  FrameConfig cfg;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> dist(-0.5, 0.5);
  std::vector<double> s(64000);
  for (auto& v : s) v = dist(rng);
  const TimeSignal sig(std::move(s), kSampleRate);
  for (auto _ : state) {
    benchmark::DoNotOptimize(stft(sig, cfg));
  }
}
BENCHMARK(BM_Stft)->Unit(benchmark::kMillisecond);

void BM_ModelForward(benchmark::State& state) {
  const auto T = state.range(0);
  ModelConfig cfg;
  const auto model = AecModel<float>::init(cfg, 7);
  const auto x = random_input(T, cfg.packed_width(), 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model_forward(model, x));
  }
}
BENCHMARK(BM_ModelForward)->Arg(497)->Unit(benchmark::kMillisecond);

void BM_ModelForwardBackward(benchmark::State& state) {
  const auto T = state.range(0);
  ModelConfig cfg;
  const auto model = AecModel<float>::init(cfg, 7);
  const auto x = random_input(T, cfg.packed_width(), 2);
  const auto d = random_input(T, cfg.mask_width(), 3);
  for (auto _ : state) {
    ModelTape<float> tape;
    const auto out = model_forward(model, x, &tape);
    benchmark::DoNotOptimize(out);
    auto grads = AecModel<float>::zeros_like(model);
    benchmark::DoNotOptimize(model_backward(model, tape, d, nullptr, grads));
  }
}
BENCHMARK(BM_ModelForwardBackward)->Arg(497)->Unit(benchmark::kMillisecond);

/// One streaming hop through the full model; the real-time budget is 8 ms.
void BM_ModelStep(benchmark::State& state) {
  ModelConfig cfg;
  const auto model = AecModel<float>::init(cfg, 7);
  auto st = StreamingState<float>::make(model);
  const VecX<float> frame = random_input(cfg.packed_width(), 1, 4).col(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model_step(model, st, frame));
  }
}
BENCHMARK(BM_ModelStep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
