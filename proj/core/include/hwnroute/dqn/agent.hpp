#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "hwnroute/dqn/features.hpp"
#include "hwnroute/dqn/qnet.hpp"
#include "hwnroute/dqn/replay.hpp"
#include "hwnroute/policy.hpp"

namespace hwnroute::dqn {

/// Linearly decaying exploration rate max(0, 1 - t/T).
double epsilon(std::int64_t t, std::int64_t total);

/// A chosen action with the state vector it was scored from.
struct Decision {
  StateVector state;
  int slot = 0;
  NodeId next = 0;
  ResourceId resource = 0;
};

/// Epsilon-greedy choice over every admissible (resource, neighbor slot)
/// pair. Greedy picks score one state vector per resource in a single batch
/// and take the highest Q, ties to the lower resource id and then the lower
/// node id. Throws RoutingError(dead_end) when nothing is admissible.
Decision act(const QNet& net, const NetworkState& state, FlowId flow, const NeighborSet& neighbors, double eps,
             std::mt19937_64& rng, const FeatureScaling& scaling);

/// Step policy backed by a shared Q-network. When a trajectory is attached,
/// every decision is appended to it.
class DqnPolicy final : public StepPolicy {
 public:
  DqnPolicy(const QNet& net, FeatureScaling scaling, double eps = 0.0, std::uint64_t seed = 0);

  Hop next_hop(const NetworkState& state, FlowId flow, const NeighborSet* neighbors) override;
  std::string name() const override { return "dqn"; }

  void set_epsilon(double eps) { eps_ = eps; }
  void reseed(std::uint64_t seed) { rng_.seed(seed); }
  void record_into(std::vector<Decision>* trajectory) { trajectory_ = trajectory; }

 private:
  const QNet* net_;
  FeatureScaling scaling_;
  double eps_;
  std::mt19937_64 rng_;
  std::vector<Decision>* trajectory_ = nullptr;
};

/// Stores every decision of `flow`'s trajectory with the route's bottleneck
/// rate as reward (0 when the flow did not complete). Returns the count.
std::size_t record_route(ReplayBuffer& buffer, const std::vector<Decision>& trajectory, const NetworkState& state,
                         FlowId flow, std::uint64_t episode);

/// One optimizer step on a uniformly sampled batch, regressing Q(s)[a] onto
/// reward * reward_scale. Returns the batch loss before the step.
double train_step(QNet& net, Adam& optimizer, const ReplayBuffer& buffer, std::size_t batch, std::mt19937_64& rng,
                  double reward_scale);

}  // namespace hwnroute::dqn
