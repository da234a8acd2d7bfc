#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hwnroute/baselines.hpp"
#include "hwnroute/dqn/trainer.hpp"
#include "hwnroute/gain_grid.hpp"
#include "hwnroute/mobility.hpp"

namespace hwnroute {

struct TechnologyConfig {
  double center_freq_mhz = 400.0;
  int subbands = 1;
  PathLossParams path_loss;
  friend bool operator==(const TechnologyConfig&, const TechnologyConfig&) = default;
};

struct TrainingConfig {
  std::int64_t episodes = 30000;
  std::size_t batch = 64;
  std::size_t replay_capacity = 100000;
  double learning_rate = 1e-4;
  int train_steps_per_episode = 1;
  double reward_scale = 1e-6;
  /// Kept for configs written against a bootstrapped update; unused.
  double discount = 0.0;
  std::uint64_t seed = 1;
  std::vector<int> trunk{300, 300, 300};
  std::vector<int> value{300, 150};
  std::vector<int> advantage{300, 150};
  friend bool operator==(const TrainingConfig&, const TrainingConfig&) = default;
};

struct MobilityConfig {
  MobilityModel model = MobilityModel::random_walk;
  int mobile_relays = 20;
  double max_speed_mps = 5.0;
  int horizon_s = 60;
  int decision_interval_s = 1;
  friend bool operator==(const MobilityConfig&, const MobilityConfig&) = default;
};

struct EvalConfig {
  int topologies = 1000;
  /// Base of the held-out topology seeds; topology k uses derive_seed(base, {k}).
  std::uint64_t seed = 1000003;
  std::vector<std::string> schemes{"dqn",
                                   "best_direction",
                                   "closest_to_destination",
                                   "least_interfered",
                                   "largest_rate",
                                   "destination_direct",
                                   "widest_path"};
  friend bool operator==(const EvalConfig&, const EvalConfig&) = default;
};

enum class SweepAxis { subbands, relay_count, resource_count, flow_count };
std::string_view to_string(SweepAxis a);
std::optional<SweepAxis> parse_sweep_axis(std::string_view name);

struct SweepConfig {
  SweepAxis axis = SweepAxis::subbands;
  std::vector<int> values{1, 2, 5, 8, 15};
  friend bool operator==(const SweepConfig&, const SweepConfig&) = default;
};

struct ScenarioConfig {
  double area_width_m = 2000.0;
  double area_height_m = 2000.0;
  int relays = 27;
  int flows = 2;
  int neighbors = 10;
  /// Minimum source-destination distance when placing endpoints.
  double min_endpoint_separation_m = 1000.0;
  std::vector<TechnologyConfig> technologies;
  double tx_power_dbm = 0.0;
  NoiseMode noise_mode = NoiseMode::density;
  double noise_dbm = -110.0;
  bool interference = true;
  /// When set, gains come from this grid file instead of the path-loss model.
  std::optional<std::string> gain_grid;
  NeighborStrategy neighbor_strategy = NeighborStrategy::distance;
  /// Keep each flow's destination in its neighbor sets.
  bool include_destination = true;
  /// "dqn" or a baseline name; the scheme used by train context and mobility.
  std::string policy = "dqn";
  int reestablish_rounds = 4;
  int hop_cap = 0;
  dqn::FeatureScaling features;
  TrainingConfig training;
  MobilityConfig mobility;
  EvalConfig eval;
  SweepConfig sweep;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Seven technologies at 40, 80, 200, 400, 800, 2000 and 3000 MHz, one
/// subband each, with the default per-band path-loss exponents.
std::vector<TechnologyConfig> default_technologies();
ScenarioConfig default_scenario();

/// Throws Error naming the offending field.
void validate(const ScenarioConfig& config);

ScenarioConfig parse_scenario(const std::string& json_text);
std::string dump_scenario(const ScenarioConfig& config);
/// Relative gain-grid paths resolve against the config file's directory.
ScenarioConfig load_scenario(const std::filesystem::path& path);
void save_scenario(const std::filesystem::path& path, const ScenarioConfig& config);

ResourceSet make_resources(const ScenarioConfig& config);
ChannelModel make_channel_model(const ScenarioConfig& config);
RadioParams make_radio(const ScenarioConfig& config);
RouteOptions make_route_options(const ScenarioConfig& config);
dqn::TrainerConfig make_trainer_config(const ScenarioConfig& config);
dqn::QNetShape make_qnet_shape(const ScenarioConfig& config);

/// Random placement: relays uniform over the area, each source uniform and
/// its destination uniform subject to the minimum separation. Everything
/// (placement and shadowing) is a function of `topology_seed`.
Topology make_topology(const ScenarioConfig& config, std::uint64_t topology_seed);

/// Builds the network for one topology seed. With a gain grid, nodes are
/// mapped to a seeded random subset of the grid's sites.
class NetworkBuilder {
 public:
  explicit NetworkBuilder(ScenarioConfig config);
  NetworkState operator()(std::uint64_t topology_seed) const;
  const ScenarioConfig& config() const { return config_; }

 private:
  ScenarioConfig config_;
  ResourceSet resources_;
  RadioParams radio_;
  std::shared_ptr<const GainGrid> grid_;
  ChannelModel model_;
};

}  // namespace hwnroute
