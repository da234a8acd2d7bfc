#include <benchmark/benchmark.h>

#include "hwnroute/baselines.hpp"
#include "hwnroute/experiment.hpp"
#include "hwnroute/scenario.hpp"

namespace {

using namespace hwnroute;

// Default 27-relay network with both flows routed directly.
NetworkState routed_network(int relays) {
  ScenarioConfig c = default_scenario();
  c.relays = relays;
  NetworkState st = NetworkBuilder(c)(42);
  for (FlowId f = 0; f < st.flow_count(); ++f) st.set_route(destination_direct(st, f));
  return st;
}

void BM_Sinr(benchmark::State& state) {
  const NetworkState st = routed_network(27);
  const NodeId tx = st.topology().source(0);
  int rx = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sinr(st, 0, tx, rx, 3));
    rx = (rx + 1) % 27;
  }
}
BENCHMARK(BM_Sinr);

void BM_AchievedSumRate(benchmark::State& state) {
  const NetworkState st = routed_network(27);
  for (auto _ : state) benchmark::DoNotOptimize(achieved_sum_rate(st));
}
BENCHMARK(BM_AchievedSumRate);

// Gain cache refresh after moving one node.
void BM_MoveNode(benchmark::State& state) {
  NetworkState st = routed_network(static_cast<int>(state.range(0)));
  double x = 100.0;
  for (auto _ : state) {
    st.move_node(0, {x, 500.0, 0.0});
    x = x > 1900.0 ? 100.0 : x + 1.0;
  }
}
BENCHMARK(BM_MoveNode)->Arg(27)->Arg(90);

void BM_BuildNetwork(benchmark::State& state) {
  ScenarioConfig c = default_scenario();
  c.relays = static_cast<int>(state.range(0));
  const NetworkBuilder build(c);
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(build(seed++));
}
BENCHMARK(BM_BuildNetwork)->Arg(27)->Arg(90);

}  // namespace
