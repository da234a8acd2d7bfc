#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "hwnroute/dqn/agent.hpp"
#include "hwnroute/router.hpp"

namespace hwnroute::dqn {

struct TrainerConfig {
  std::int64_t episodes = 30000;  // also the exploration horizon T
  std::size_t batch = 64;
  std::size_t replay_capacity = 100000;
  double learning_rate = 1e-4;
  int train_steps_per_episode = 1;
  double reward_scale = 1e-6;  // bit/s -> Mbit/s
  std::uint64_t seed = 1;
  FeatureScaling scaling;
  RouteOptions route;
};

/// Builds the network for one episode from its topology seed.
using NetworkFactory = std::function<NetworkState(std::uint64_t topology_seed)>;

struct TrainLogRow {
  std::int64_t step = 0;
  std::int64_t episode = 0;
  double epsilon = 0.0;
  double loss = 0.0;
  double reward_bps = 0.0;  // bottleneck rate of the episode's agent flow
};

/// Episode loop: every flow but the last is routed by the
/// closest-to-destination baseline, the last by the epsilon-greedy agent,
/// whose decisions go to the replay buffer with the finished route's rate.
/// Each episode draws its topology from derive_seed(seed, {episode}), and
/// exploration and batch sampling use per-episode streams, so a run resumed
/// from saved state continues bit-identically.
class Trainer {
 public:
  Trainer(TrainerConfig config, QNet net, NetworkFactory factory);

  /// Runs episodes until `episode_end` (exclusive) or the configured total.
  void run(std::int64_t episode_end);
  void run() { run(config_.episodes); }
  void run_episode();

  const QNet& net() const { return net_; }
  const TrainerConfig& config() const { return config_; }
  std::int64_t episode() const { return episode_; }
  std::int64_t steps() const { return steps_; }
  const ReplayBuffer& replay() const { return replay_; }
  const std::vector<TrainLogRow>& log() const { return log_; }
  void set_log_callback(std::function<void(const TrainLogRow&)> cb) { on_log_ = std::move(cb); }

  /// Optimizer moments, counters and replay buffer (not the network).
  void save_state(const std::filesystem::path& path) const;
  void load_state(const std::filesystem::path& path);

 private:
  TrainerConfig config_;
  QNet net_;
  NetworkFactory factory_;
  Adam adam_;
  ReplayBuffer replay_;
  std::int64_t episode_ = 0;
  std::int64_t steps_ = 0;
  std::vector<TrainLogRow> log_;
  std::function<void(const TrainLogRow&)> on_log_;
};

}  // namespace hwnroute::dqn
