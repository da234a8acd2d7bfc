#include "hwnroute/dqn/agent.hpp"

#include <algorithm>
#include <limits>

#include "hwnroute/error.hpp"

namespace hwnroute::dqn {

double epsilon(std::int64_t t, std::int64_t total) {
  if (total <= 0) return 0.0;
  return std::max(0.0, 1.0 - static_cast<double>(t) / static_cast<double>(total));
}

Decision act(const QNet& net, const NetworkState& state, FlowId flow, const NeighborSet& neighbors, double eps,
             std::mt19937_64& rng, const FeatureScaling& scaling) {
  const int slots = net.shape().actions;
  const int resources = state.resource_count();
  std::vector<StateVector> states;
  states.reserve(static_cast<std::size_t>(resources));
  std::vector<std::pair<ResourceId, int>> valid;
  for (ResourceId c = 0; c < resources; ++c) {
    states.push_back(featurize(state, flow, neighbors, c, slots, scaling));
    for (int s = 0; s < slots; ++s) {
      if (states.back().valid[static_cast<std::size_t>(s)]) valid.emplace_back(c, s);
    }
  }
  if (valid.empty()) throw RoutingError(RoutingFailure::dead_end);

  auto decide = [&](ResourceId c, int s) {
    Decision d;
    d.state = std::move(states[static_cast<std::size_t>(c)]);
    d.slot = s;
    d.next = d.state.nodes[static_cast<std::size_t>(s)];
    d.resource = c;
    return d;
  };

  bool explore = false;
  if (eps >= 1.0) {
    explore = true;
  } else if (eps > 0.0) {
    explore = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < eps;
  }
  if (explore) {
    std::uniform_int_distribution<std::size_t> pick(0, valid.size() - 1);
    const auto [c, s] = valid[pick(rng)];
    return decide(c, s);
  }

  const int inputs = net.shape().inputs;
  Eigen::MatrixXd x(inputs, resources);
  for (ResourceId c = 0; c < resources; ++c) {
    x.col(c) = Eigen::Map<const Eigen::VectorXd>(states[static_cast<std::size_t>(c)].features.data(), inputs);
  }
  const Eigen::MatrixXd q = net.forward(x);
  ResourceId best_c = -1;
  int best_s = -1;
  double best_q = -std::numeric_limits<double>::infinity();
  for (const auto& [c, s] : valid) {
    const double v = q(s, c);
    bool better = best_c < 0 || v > best_q;
    if (!better && v == best_q && c == best_c) {
      better = states[static_cast<std::size_t>(c)].nodes[static_cast<std::size_t>(s)] <
               states[static_cast<std::size_t>(c)].nodes[static_cast<std::size_t>(best_s)];
    }
    if (better) {
      best_c = c;
      best_s = s;
      best_q = v;
    }
  }
  return decide(best_c, best_s);
}

DqnPolicy::DqnPolicy(const QNet& net, FeatureScaling scaling, double eps, std::uint64_t seed)
    : net_(&net), scaling_(scaling), eps_(eps), rng_(seed) {}

Hop DqnPolicy::next_hop(const NetworkState& state, FlowId flow, const NeighborSet* neighbors) {
  if (!neighbors) throw Error("dqn policy needs a neighbor set");
  Decision d = act(*net_, state, flow, *neighbors, eps_, rng_, scaling_);
  const Hop hop{d.next, d.resource};
  if (trajectory_) trajectory_->push_back(std::move(d));
  return hop;
}

std::size_t record_route(ReplayBuffer& buffer, const std::vector<Decision>& trajectory, const NetworkState& state,
                         FlowId flow, std::uint64_t episode) {
  const double reward = state.status(flow) == FlowStatus::complete ? route_rate(state, flow) : 0.0;
  for (const Decision& d : trajectory) {
    buffer.add(Experience{d.state.features, d.slot, d.resource, reward, episode});
  }
  return trajectory.size();
}

double train_step(QNet& net, Adam& optimizer, const ReplayBuffer& buffer, std::size_t batch, std::mt19937_64& rng,
                  double reward_scale) {
  if (buffer.empty()) throw Error("train_step: replay buffer is empty");
  const auto picked = buffer.sample(batch, rng);
  const int inputs = net.shape().inputs;
  Eigen::MatrixXd x(inputs, static_cast<Eigen::Index>(batch));
  std::vector<int> actions(batch);
  std::vector<double> targets(batch);
  for (std::size_t b = 0; b < batch; ++b) {
    const Experience& e = buffer[picked[b]];
    if (static_cast<int>(e.features.size()) != inputs) throw Error("train_step: experience width mismatch");
    x.col(static_cast<Eigen::Index>(b)) = Eigen::Map<const Eigen::VectorXd>(e.features.data(), inputs);
    actions[b] = e.action;
    targets[b] = e.reward * reward_scale;
  }
  Eigen::VectorXd grad;
  const double loss = net.loss_and_gradient(x, actions, targets, grad);
  optimizer.step(net.parameters(), grad);
  return loss;
}

}  // namespace hwnroute::dqn
