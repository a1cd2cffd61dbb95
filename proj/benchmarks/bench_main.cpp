#include <benchmark/benchmark.h>

#include <random>

#include "synvol/detect.hpp"
#include "synvol/pair.hpp"
#include "synvol/raster.hpp"
#include "synvol/score.hpp"
#include "synvol/synth.hpp"
#include "synvol/tile.hpp"

using namespace synvol;

namespace {

std::vector<Site> random_sites(std::size_t n, std::int64_t extent, PointId first, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> c(0, extent - 1);
  std::vector<Site> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({first + i, {c(rng), c(rng), c(rng)}});
  return out;
}

MaskVolume random_mask(Dims d, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(density);
  MaskVolume m(d);
  for (auto& v : m.values()) v = coin(rng);
  return m;
}

}  // namespace

static void BM_LabelComponents(benchmark::State& state) {
  const auto n = state.range(0);
  const auto mask = random_mask({n, n, n}, 0.2, 1);
  for (auto _ : state) benchmark::DoNotOptimize(label_components(mask).count);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(mask.size()));
}
BENCHMARK(BM_LabelComponents)->Arg(32)->Arg(64)->Arg(128);

static void BM_DetectSparseScene(benchmark::State& state) {
  SceneSpec spec;
  spec.dims = {256, 256, 256};
  spec.n_pairs = 100;
  const auto mask = rasterize_squares(make_scene(spec), PointKind::pre, spec.dims, 3);
  for (auto _ : state) benchmark::DoNotOptimize(detect_mask(mask, Connectivity::twenty_six, 1).size());
}
BENCHMARK(BM_DetectSparseScene)->Unit(benchmark::kMillisecond);

static void BM_Assign(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  // Density kept similar to a 100-point 256^3 volume scaled to n points.
  const auto extent = static_cast<std::int64_t>(std::cbrt(static_cast<double>(n)) * 55.0);
  auto preds = random_sites(n, extent, 1, 2);
  const auto gts = random_sites(n, extent, 100000, 3);
  for (auto _ : state) benchmark::DoNotOptimize(assign(preds, gts).tp);
}
BENCHMARK(BM_Assign)->Arg(100)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

static void BM_MatchGrid(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto pres = random_sites(n, 512, 1, 4);
  const auto posts = random_sites(n, 512, 1000000, 5);
  for (auto _ : state) benchmark::DoNotOptimize(match_nearest(posts, pres).assignments.size());
}
BENCHMARK(BM_MatchGrid)->Arg(100)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

static void BM_MatchScan(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto pres = random_sites(n, 512, 1, 4);
  const auto posts = random_sites(n, 512, 1000000, 5);
  for (auto _ : state) benchmark::DoNotOptimize(match_nearest_scan(posts, pres).assignments.size());
}
BENCHMARK(BM_MatchScan)->Arg(100)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

static void BM_InferTiled(benchmark::State& state) {
  const auto n = state.range(0);
  const Dims vol{n, n, n};
  const auto plan = plan_patches(vol, {64, 64, 64});
  for (auto _ : state) {
    benchmark::DoNotOptimize(infer_tiled(plan, [](Coord, Dims p) { return ProbVolume(p, 0.5f); }).size());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(vol.voxels()));
}
BENCHMARK(BM_InferTiled)->Arg(96)->Arg(160)->Unit(benchmark::kMillisecond);

static void BM_Render(benchmark::State& state) {
  SceneSpec spec;
  spec.dims = {128, 128, 128};
  spec.n_pairs = 30;
  const auto centers = make_scene(spec).positions(PointKind::pre);
  const double noise = state.range(0) ? 0.2 : 0.0;
  for (auto _ : state) benchmark::DoNotOptimize(render_probability(centers, spec.dims, 1.5, noise, 7).size());
}
BENCHMARK(BM_Render)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
