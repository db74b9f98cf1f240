#include <benchmark/benchmark.h>

#include "qmcts/analysis.hpp"
#include "qmcts/hybrid.hpp"
#include "qmcts/mcts.hpp"
#include "qmcts/ssr.hpp"

using namespace qmcts;

namespace {

void BM_Energy(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int p = static_cast<int>(state.range(1));
  const auto cost = build_diagonal(generate_sat_unique(n, 3.0, 1));
  QaoaEvaluator eval(cost);
  std::vector<double> angles(2 * p);
  for (int k = 0; k < 2 * p; ++k) angles[k] = 0.1 * (k + 1);
  for (auto _ : state) benchmark::DoNotOptimize(eval.energy(angles));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Energy)->Args({7, 1})->Args({7, 4})->Args({10, 4})->Args({10, 10})->Args({14, 4});

void BM_Game(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const auto cost = build_diagonal(generate_sat_unique(7, 3.0, 2));
  const auto leaf = qaoa_leaf_cost(cost);
  const auto space = SearchSpace::unrestricted(p, 30);
  auto c = MctsConfig::defaults(state.range(1) ? Variant::single_player : Variant::vanilla);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    c.seed = seed++;
    benchmark::DoNotOptimize(play_game(space, leaf, c).energy);
  }
  state.SetItemsProcessed(state.iterations() * c.budget.total(2 * p));
}
BENCHMARK(BM_Game)->Args({1, 0})->Args({2, 0})->Args({2, 1})->Args({4, 1})->Unit(benchmark::kMillisecond);

void BM_Iterative(benchmark::State& state) {
  const auto cost = build_diagonal(generate_sat_unique(7, 3.0, 3));
  IterativeOptions opt;
  opt.p_max = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_iterative(cost, opt).back().energy);
}
BENCHMARK(BM_Iterative)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_Enumerate(benchmark::State& state) {
  const auto cost = build_diagonal(generate_sat_unique(7, 3.0, 4));
  const auto space = SearchSpace::unrestricted(2, static_cast<int>(state.range(0)));
  LandscapeOptions opt;
  opt.threads = static_cast<int>(state.range(1));
  for (auto _ : state)
    benchmark::DoNotOptimize(enumerate_leaves(cost, space, [](const LeafRecord&) {}, opt).leaves);
  state.SetItemsProcessed(state.iterations() * space.leaf_count());
}
BENCHMARK(BM_Enumerate)->Args({12, 1})->Args({20, 1})->Args({20, 2})->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_LocalMinimize(benchmark::State& state) {
  const auto cost = build_diagonal(generate_sat_unique(7, 3.0, 5));
  const int p = static_cast<int>(state.range(0));
  std::vector<double> start(2 * p);
  for (int k = 0; k < 2 * p; ++k) start[k] = 0.2 + 0.1 * k;
  for (auto _ : state) benchmark::DoNotOptimize(local_minimize(cost, Schedule(start), {}).energy);
}
BENCHMARK(BM_LocalMinimize)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
