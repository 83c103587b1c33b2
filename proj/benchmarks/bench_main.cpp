// Microbenchmarks for the hot paths: curve indexing, network evaluation,
// grid sup-norm scans, and composite model evaluation.

#include <benchmark/benchmark.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "rescade/cascade.hpp"
#include "rescade/corpus.hpp"
#include "rescade/grid.hpp"
#include "rescade/hilbert.hpp"
#include "rescade/rng.hpp"
#include "rescade/shallow.hpp"

namespace {

rescade::ShallowNet random_net(int input_dim, int units, std::uint64_t seed) {
  rescade::ShallowNet net = rescade::ShallowNet::zeros(
      input_dim, units, rescade::Activation(rescade::ActivationKind::tanh));
  rescade::Rng rng(seed);
  for (double& v : net.outer) v = rng.uniform(-1.0, 1.0);
  for (double& v : net.inner_bias) v = rng.uniform(-2.0, 2.0);
  for (double& v : net.inner_weights) v = rng.uniform(-2.0, 2.0);
  return net;
}

void BM_HilbertEncode(benchmark::State& state) {
  const int dims = static_cast<int>(state.range(0));
  const int level = static_cast<int>(state.range(1));
  rescade::Rng rng(1);
  const std::uint64_t mask = (std::uint64_t{1} << level) - 1;
  rescade::CellCoord cell{dims, level, std::vector<std::uint64_t>(dims)};
  for (auto _ : state) {
    for (int i = 0; i < dims; ++i) cell.coords[i] = rng.next_u64() & mask;
    benchmark::DoNotOptimize(rescade::hilbert_encode(cell).value);
  }
}
BENCHMARK(BM_HilbertEncode)->Args({2, 16})->Args({3, 16})->Args({6, 8});

void BM_HilbertDecode(benchmark::State& state) {
  const int dims = static_cast<int>(state.range(0));
  const int level = static_cast<int>(state.range(1));
  rescade::Rng rng(2);
  const std::uint64_t mask =
      (std::uint64_t{1} << (dims * level)) - 1;
  for (auto _ : state) {
    const rescade::HilbertIndex idx{rng.next_u64() & mask, dims, level};
    benchmark::DoNotOptimize(rescade::hilbert_decode(idx).coords[0]);
  }
}
BENCHMARK(BM_HilbertDecode)->Args({2, 16})->Args({3, 16})->Args({6, 8});

void BM_SnapPoint(benchmark::State& state) {
  const int level = static_cast<int>(state.range(0));
  rescade::Rng rng(3);
  double p[3];
  for (auto _ : state) {
    for (double& c : p) c = rng.uniform(0.0, 1.0);
    benchmark::DoNotOptimize(
        rescade::snap_point(std::span(p, 3), level).first.value);
  }
}
BENCHMARK(BM_SnapPoint)->Arg(4)->Arg(10)->Arg(16);

void BM_ShallowEval(benchmark::State& state) {
  const int units = static_cast<int>(state.range(0));
  const rescade::ShallowNet net = random_net(2, units, 4);
  rescade::Rng rng(5);
  double x[2];
  for (auto _ : state) {
    x[0] = rng.uniform(-1.0, 1.0);
    x[1] = rng.uniform(-1.0, 1.0);
    benchmark::DoNotOptimize(net.eval(std::span(x, 2)));
  }
}
BENCHMARK(BM_ShallowEval)->Arg(4)->Arg(16)->Arg(64);

void BM_GridSupNorm(benchmark::State& state) {
  const int points = static_cast<int>(state.range(0));
  const rescade::Grid grid = rescade::Grid::uniform(2, points);
  const rescade::ShallowNet net = random_net(2, 8, 6);
  const auto f = [&](std::span<const double> x) { return net.eval(x); };
  const auto zero = [](std::span<const double>) { return 0.0; };
  for (auto _ : state) {
    benchmark::DoNotOptimize(rescade::sup_norm_diff(f, zero, grid));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(grid.size()));
}
BENCHMARK(BM_GridSupNorm)->Arg(33)->Arg(129);

void BM_CascadeEval(benchmark::State& state) {
  const int depth = static_cast<int>(state.range(0));
  const auto& f = rescade::find_function("bump1d");
  const rescade::Grid grid = rescade::Grid::uniform(1, 65);
  rescade::FitConfig cfg;
  cfg.rng_seed = 12;
  cfg.iterations = 60;
  cfg.restarts = 2;
  const rescade::CascadeTraining t = rescade::train_cascade(
      f.oracle, grid, depth, 4, rescade::FeatureMode::x_plus_prev_approx, cfg);
  rescade::Rng rng(7);
  double x;
  for (auto _ : state) {
    x = rng.uniform(-1.0, 1.0);
    benchmark::DoNotOptimize(rescade::eval_cascade(t.model, std::span(&x, 1)));
  }
}
BENCHMARK(BM_CascadeEval)->Arg(1)->Arg(4)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
