#include "hwnroute/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "hwnroute/error.hpp"

namespace hwnroute {

std::string_view to_string(MobilityModel m) {
  return m == MobilityModel::random_walk ? "random_walk" : "random_waypoint";
}

std::optional<MobilityModel> parse_mobility_model(std::string_view name) {
  if (name == "random_walk") return MobilityModel::random_walk;
  if (name == "random_waypoint") return MobilityModel::random_waypoint;
  return std::nullopt;
}

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Vec3 random_point(std::mt19937_64& rng, const Area& a, double z) {
  const double x = uniform(rng, 0.0, a.width);
  const double y = uniform(rng, 0.0, a.height);
  return {x, y, z};
}

// Mirror-folds x into [0, w]; returns whether the travel direction flipped.
bool reflect(double& x, double w) {
  const double period = 2.0 * w;
  double m = std::fmod(x, period);
  if (m < 0.0) m += period;
  const auto bounces = static_cast<long long>(std::floor(x / w));
  if (m > w) m = period - m;
  x = std::clamp(m, 0.0, w);
  return (bounces % 2) != 0;
}

}  // namespace

MobilityState make_mobility(const Topology& topology, MobilityModel model, int mobile_relays, double max_speed,
                            std::uint64_t seed) {
  if (mobile_relays < 0 || mobile_relays > topology.relay_count()) {
    throw Error("mobile relay count must lie in [0, relay count]");
  }
  if (!(max_speed >= 0.0)) throw Error("maximum speed must be non-negative");
  MobilityState ms;
  ms.model = model;
  ms.bounds = topology.area();
  ms.max_speed = max_speed;
  ms.rng.seed(seed);

  std::vector<NodeId> relays(static_cast<std::size_t>(topology.relay_count()));
  std::iota(relays.begin(), relays.end(), 0);
  std::shuffle(relays.begin(), relays.end(), ms.rng);
  relays.resize(static_cast<std::size_t>(mobile_relays));
  std::sort(relays.begin(), relays.end());

  for (NodeId n : relays) {
    MobileNode m;
    m.node = n;
    m.position = topology.position(n);
    m.direction = uniform(ms.rng, 0.0, 2.0 * std::numbers::pi);
    m.speed = uniform(ms.rng, 0.0, max_speed);
    m.waypoint = random_point(ms.rng, ms.bounds, m.position.z);
    ms.nodes.push_back(m);
  }
  return ms;
}

void step_random_walk(MobilityState& ms, double dt) {
  for (MobileNode& m : ms.nodes) {
    m.direction = uniform(ms.rng, 0.0, 2.0 * std::numbers::pi);
    m.speed = uniform(ms.rng, 0.0, ms.max_speed);
    double dx = std::cos(m.direction);
    double dy = std::sin(m.direction);
    double x = m.position.x + m.speed * dt * dx;
    double y = m.position.y + m.speed * dt * dy;
    if (reflect(x, ms.bounds.width)) dx = -dx;
    if (reflect(y, ms.bounds.height)) dy = -dy;
    m.position.x = x;
    m.position.y = y;
    m.direction = std::atan2(dy, dx);
    if (m.direction < 0.0) m.direction += 2.0 * std::numbers::pi;
  }
}

void step_random_waypoint(MobilityState& ms, double dt) {
  for (MobileNode& m : ms.nodes) {
    m.speed = uniform(ms.rng, 0.0, ms.max_speed);
    const Vec3 to = m.waypoint - m.position;
    const double d = norm(to);
    const double travel = m.speed * dt;
    if (d <= travel) {
      m.position = m.waypoint;
      m.waypoint = random_point(ms.rng, ms.bounds, m.position.z);
    } else {
      m.position = m.position + (travel / d) * to;
      m.position.x = std::clamp(m.position.x, 0.0, ms.bounds.width);
      m.position.y = std::clamp(m.position.y, 0.0, ms.bounds.height);
    }
  }
}

void step_mobility(MobilityState& ms, double dt) {
  if (ms.model == MobilityModel::random_walk) {
    step_random_walk(ms, dt);
  } else {
    step_random_waypoint(ms, dt);
  }
}

void apply_positions(const MobilityState& ms, NetworkState& state) {
  if (ms.nodes.empty()) return;
  std::vector<Vec3> positions(state.topology().positions().begin(), state.topology().positions().end());
  for (const MobileNode& m : ms.nodes) positions.at(static_cast<std::size_t>(m.node)) = m.position;
  state.set_positions(positions);
}

std::vector<double> run_mobility_experiment(NetworkState state, PolicyTable policies, const RouteOptions& options,
                                            MobilityState ms, const MobilitySchedule& schedule) {
  if (schedule.horizon_s < 0) throw Error("mobility horizon must be non-negative");
  if (schedule.decision_interval_s < 1) throw Error("decision interval must be at least 1 s");
  std::vector<double> series;
  series.reserve(static_cast<std::size_t>(schedule.horizon_s));
  for (int t = 0; t < schedule.horizon_s; ++t) {
    if (t > 0) {
      step_mobility(ms);
      apply_positions(ms, state);
    }
    if (t % schedule.decision_interval_s == 0) {
      establish_all(state, policies, options);
      reestablish(state, policies, options, schedule.reestablish_rounds);
    }
    series.push_back(achieved_sum_rate(state));
  }
  return series;
}

}  // namespace hwnroute
