#include <benchmark/benchmark.h>

#include "shield/attacks.hpp"
#include "shield/dataset.hpp"
#include "shield/diff_jpeg.hpp"
#include "shield/jpeg.hpp"
#include "shield/nn.hpp"
#include "shield/slq.hpp"
#include "shield/train.hpp"

namespace {

using namespace shield;

const Image& sample_image() {
  static const Image img = generate_synthetic(1, 7, Split::kEval).images.front();
  return img;
}

void BM_Dct2d(benchmark::State& state) {
  Block b{};
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = static_cast<double>(i % 17) - 8.0;
  for (auto _ : state) {
    Block c = idct2d(dct2d(b));
    benchmark::DoNotOptimize(c);
  }
}
BENCHMARK(BM_Dct2d);

void BM_JpegRoundTrip(benchmark::State& state) {
  const int q = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(jpeg_round_trip(sample_image(), q));
}
BENCHMARK(BM_JpegRoundTrip)->Arg(20)->Arg(80);

void BM_DiffJpegVjp(benchmark::State& state) {
  const Plane& x = sample_image().plane();
  const Plane ct = x;
  for (auto _ : state) benchmark::DoNotOptimize(diff_jpeg_vjp(x, 40, ct));
}
BENCHMARK(BM_DiffJpegVjp);

void BM_SlqPreprocess(benchmark::State& state) {
  SlqConfig cfg;
  cfg.seed = 3;
  for (auto _ : state) benchmark::DoNotOptimize(slq_preprocess(sample_image(), cfg));
}
BENCHMARK(BM_SlqPreprocess);

void BM_Forward(benchmark::State& state) {
  const ModelParams p = init_params(1);
  for (auto _ : state) benchmark::DoNotOptimize(forward(p, sample_image().plane()));
}
BENCHMARK(BM_Forward);

void BM_Backward(benchmark::State& state) {
  const ModelParams p = init_params(1);
  Logits ct{};
  ct[3] = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(backward(p, sample_image().plane(), ct));
}
BENCHMARK(BM_Backward);

void BM_SurrogateGrad(benchmark::State& state) {
  Surrogate s;
  for (int k = 0; k < state.range(0); ++k) s.models.push_back(init_params(10 + k));
  s.qualities = {20, 40, 60, 80};
  for (auto _ : state) benchmark::DoNotOptimize(surrogate_grad(s, sample_image().plane(), 0));
}
BENCHMARK(BM_SurrogateGrad)->Arg(1)->Arg(4);

}  // namespace
BENCHMARK_MAIN();
