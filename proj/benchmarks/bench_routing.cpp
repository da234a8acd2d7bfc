#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "hwnroute/baselines.hpp"
#include "hwnroute/experiment.hpp"
#include "hwnroute/scenario.hpp"

namespace {

using namespace hwnroute;

void BM_WidestPathDense(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (double& x : w) x = u(rng) < 0.3 ? 0.0 : u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(widest_path(w, n, 0, n - 1));
}
BENCHMARK(BM_WidestPathDense)->Arg(31)->Arg(94)->Arg(250);

// Full establishment plus four re-establishment rounds for two flows.
void BM_RunScheme(benchmark::State& state, const char* scheme) {
  ScenarioConfig c = default_scenario();
  const NetworkBuilder build(c);
  const dqn::QNet net(make_qnet_shape(c), 1);
  std::uint64_t seed = 1;
  for (auto _ : state) {
    state.PauseTiming();
    NetworkState st = build(seed++);
    state.ResumeTiming();
    benchmark::DoNotOptimize(run_scheme(st, scheme, &net, c));
  }
}
BENCHMARK_CAPTURE(BM_RunScheme, dqn, "dqn");
BENCHMARK_CAPTURE(BM_RunScheme, closest_to_destination, "closest_to_destination");
BENCHMARK_CAPTURE(BM_RunScheme, largest_rate, "largest_rate");
BENCHMARK_CAPTURE(BM_RunScheme, widest_path, "widest_path");

}  // namespace
BENCHMARK_MAIN();
