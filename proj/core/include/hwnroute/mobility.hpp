#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "hwnroute/router.hpp"

namespace hwnroute {

enum class MobilityModel { random_walk, random_waypoint };

std::string_view to_string(MobilityModel m);
std::optional<MobilityModel> parse_mobility_model(std::string_view name);

struct MobileNode {
  NodeId node = 0;
  Vec3 position;
  double direction = 0.0;  // rad, random walk heading
  Vec3 waypoint;           // random waypoint target
  double speed = 0.0;      // m/s
};

struct MobilityState {
  MobilityModel model = MobilityModel::random_walk;
  Area bounds;
  double max_speed = 5.0;
  std::vector<MobileNode> nodes;
  std::mt19937_64 rng;
};

/// Picks `mobile_relays` relays uniformly at random to move; endpoints stay
/// put. Draws initial headings, speeds and waypoints.
MobilityState make_mobility(const Topology& topology, MobilityModel model, int mobile_relays, double max_speed,
                            std::uint64_t seed);

/// Every node redraws heading in [0, 2 pi) and speed in [0, max] and moves
/// speed * dt, reflecting off the area walls.
void step_random_walk(MobilityState& ms, double dt = 1.0);

/// Every node redraws its speed and moves toward its waypoint; a node that
/// can reach the waypoint this step stops there and draws a new one.
void step_random_waypoint(MobilityState& ms, double dt = 1.0);

void step_mobility(MobilityState& ms, double dt = 1.0);

/// Writes the mobile nodes' positions into the network (refreshing gains).
void apply_positions(const MobilityState& ms, NetworkState& state);

struct MobilitySchedule {
  int horizon_s = 60;
  int decision_interval_s = 1;
  int reestablish_rounds = 4;
};

/// Per-second achieved sum rate over [0, horizon). At every decision instant
/// all flows are re-established on the current positions; in between, the
/// routes stay frozen and only their rates are recomputed after each move.
std::vector<double> run_mobility_experiment(NetworkState state, PolicyTable policies, const RouteOptions& options,
                                            MobilityState ms, const MobilitySchedule& schedule);

}  // namespace hwnroute
