#include <benchmark/benchmark.h>

#include "ssinr/backbones.hpp"
#include "ssinr/metrics.hpp"
#include "ssinr/signals.hpp"
#include "ssinr/training.hpp"

namespace {

using namespace ssinr;

template <typename T>
void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  const auto a = uniform_fill<T>(rng, 4096, n, -1.0, 1.0);
  const auto b = uniform_fill<T>(rng, n, n, -1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b));
  state.SetItemsProcessed(state.iterations() * 2 * 4096 * static_cast<std::int64_t>(n * n));
}
BENCHMARK(BM_Matmul<float>)->Arg(128)->Arg(256)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Matmul<double>)->Arg(128)->Arg(256)->Unit(benchmark::kMicrosecond);

BackboneConfig bench_backbone(BackboneKind kind, std::size_t width) {
  BackboneConfig c;
  c.kind = kind;
  c.width = width;
  c.in_dim = 2;
  c.out_dim = 3;
  return c;
}

// One training step's worth of network work on a 64×64 grid.
template <typename T>
void BM_ForwardBackward(benchmark::State& state) {
  const auto kind = static_cast<BackboneKind>(state.range(0));
  const BackboneConfig config = bench_backbone(kind, static_cast<std::size_t>(state.range(1)));
  Rng rng(2);
  const auto model = init_model<T>(config, rng);
  const auto features = backbone_features(config, make_grid(64, 64).cast<T>());
  const auto target = uniform_fill<T>(rng, features.rows(), 3, -1.0, 1.0);
  ForwardCache<T> cache;
  for (auto _ : state) {
    const auto out = forward(model, features, &cache);
    const auto loss = mse_loss(out, target);
    benchmark::DoNotOptimize(backward(model, cache, loss.grad));
  }
  state.SetLabel(to_string(kind));
}
BENCHMARK(BM_ForwardBackward<float>)
    ->ArgsProduct({{static_cast<int>(BackboneKind::ReluPe), static_cast<int>(BackboneKind::Siren),
                    static_cast<int>(BackboneKind::Finer)},
                   {128, 256}})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ForwardBackward<double>)
    ->ArgsProduct({{static_cast<int>(BackboneKind::Siren)}, {128}})
    ->Unit(benchmark::kMillisecond);

void BM_Ssim(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  const auto a = uniform_fill<double>(rng, side * side, 3, -1.0, 1.0);
  const auto b = uniform_fill<double>(rng, side * side, 3, -1.0, 1.0);
  const auto ua = rescale_to_unit(a, -1.0, 1.0);
  const auto ub = rescale_to_unit(b, -1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(ssim(ua, ub, side, side));
}
BENCHMARK(BM_Ssim)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_Psnr(benchmark::State& state) {
  Rng rng(4);
  const auto a = uniform_fill<double>(rng, 256 * 256, 3, 0.0, 1.0);
  const auto b = uniform_fill<double>(rng, 256 * 256, 3, 0.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(psnr(a, b));
}
BENCHMARK(BM_Psnr)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
