#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "hwnroute/dqn/qnet.hpp"
#include "hwnroute/dqn/replay.hpp"

namespace {

using hwnroute::dqn::Adam;
using hwnroute::dqn::QNet;
using hwnroute::dqn::QNetShape;

Eigen::MatrixXd random_inputs(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::MatrixXd x(rows, cols);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = nd(rng);
  return x;
}

// One column per resource, as in a greedy decision.
void BM_QNetForward(benchmark::State& state) {
  const QNet net(QNetShape::for_neighbors(10), 1);
  const Eigen::MatrixXd x = random_inputs(50, static_cast<int>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_QNetForward)->Arg(1)->Arg(7)->Arg(64);

void BM_QNetTrainStep(benchmark::State& state) {
  QNet net(QNetShape::for_neighbors(10), 1);
  Adam adam(net.parameter_count(), {});
  const int batch = static_cast<int>(state.range(0));
  const Eigen::MatrixXd x = random_inputs(50, batch, 3);
  std::vector<int> actions(static_cast<std::size_t>(batch));
  std::vector<double> targets(static_cast<std::size_t>(batch));
  for (int b = 0; b < batch; ++b) {
    actions[static_cast<std::size_t>(b)] = b % 10;
    targets[static_cast<std::size_t>(b)] = 0.1 * b;
  }
  Eigen::VectorXd grad;
  for (auto _ : state) {
    benchmark::DoNotOptimize(net.loss_and_gradient(x, actions, targets, grad));
    adam.step(net.parameters(), grad);
  }
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_QNetTrainStep)->Arg(64);

}  // namespace
