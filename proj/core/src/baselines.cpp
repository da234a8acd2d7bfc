#include "hwnroute/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hwnroute/error.hpp"

namespace hwnroute {

std::string_view to_string(Baseline b) {
  switch (b) {
    case Baseline::best_direction:
      return "best_direction";
    case Baseline::closest_to_destination:
      return "closest_to_destination";
    case Baseline::least_interfered:
      return "least_interfered";
    case Baseline::largest_rate:
      return "largest_rate";
    case Baseline::destination_direct:
      return "destination_direct";
    case Baseline::widest_path:
      return "widest_path";
  }
  return "unknown";
}

std::optional<Baseline> parse_baseline(std::string_view name) {
  for (Baseline b : kAllBaselines) {
    if (to_string(b) == name) return b;
  }
  return std::nullopt;
}

ResourceId best_resource(const NetworkState& state, FlowId flow, NodeId next) {
  const NodeId e = state.frontier(flow);
  ResourceId best = -1;
  double best_rate = -1.0;
  for (ResourceId c : admissible_resources(state, flow, next)) {
    const double r = link_rate(state, flow, e, next, c);
    if (r > best_rate) {
      best_rate = r;
      best = c;
    }
  }
  if (best < 0) throw RoutingError(RoutingFailure::dead_end);
  return best;
}

namespace {

// Neighbor minimizing `cost` among those reachable on some resource.
template <typename Cost>
Hop min_node_step(const NetworkState& state, FlowId flow, const NeighborSet& neighbors, Cost&& cost) {
  NodeId best = -1;
  double best_cost = std::numeric_limits<double>::infinity();
  for (NodeId n : neighbors.neighbors) {
    if (admissible_resources(state, flow, n).empty()) continue;
    const double v = cost(n);
    if (best < 0 || v < best_cost || (v == best_cost && n < best)) {
      best = n;
      best_cost = v;
    }
  }
  if (best < 0) throw RoutingError(RoutingFailure::dead_end);
  return {best, best_resource(state, flow, best)};
}

// (node, resource) minimizing `cost`; ties to lower resource id, then node id.
template <typename Cost>
Hop min_pair_step(const NetworkState& state, FlowId flow, const NeighborSet& neighbors, Cost&& cost) {
  Hop best{-1, -1};
  double best_cost = std::numeric_limits<double>::infinity();
  for (NodeId n : neighbors.neighbors) {
    for (ResourceId c : admissible_resources(state, flow, n)) {
      const double v = cost(n, c);
      const bool better = best.next < 0 || v < best_cost ||
                          (v == best_cost && (c < best.resource || (c == best.resource && n < best.next)));
      if (better) {
        best = {n, c};
        best_cost = v;
      }
    }
  }
  if (best.next < 0) throw RoutingError(RoutingFailure::dead_end);
  return best;
}

}  // namespace

Hop best_direction_step(const NetworkState& state, FlowId flow, const NeighborSet& neighbors) {
  const Topology& topo = state.topology();
  const Vec3 here = topo.position(state.frontier(flow));
  const Vec3 dest = topo.position(topo.destination(flow));
  return min_node_step(state, flow, neighbors,
                       [&](NodeId n) { return angle_at(here, dest, topo.position(n)); });
}

Hop closest_to_destination_step(const NetworkState& state, FlowId flow, const NeighborSet& neighbors) {
  const Topology& topo = state.topology();
  const Vec3 dest = topo.position(topo.destination(flow));
  return min_node_step(state, flow, neighbors, [&](NodeId n) { return distance(topo.position(n), dest); });
}

Hop least_interfered_step(const NetworkState& state, FlowId flow, const NeighborSet& neighbors) {
  return min_pair_step(state, flow, neighbors,
                       [&](NodeId n, ResourceId c) { return interference_at(state, n, c); });
}

Hop largest_rate_step(const NetworkState& state, FlowId flow, const NeighborSet& neighbors) {
  const NodeId e = state.frontier(flow);
  return min_pair_step(state, flow, neighbors,
                       [&](NodeId n, ResourceId c) { return -link_rate(state, flow, e, n, c); });
}

Route destination_direct(const NetworkState& state, FlowId flow) {
  const Topology& topo = state.topology();
  if (state.status(flow) != FlowStatus::pending || state.route(flow).hop_count() != 0) {
    throw Error("destination_direct: flow must be at its source");
  }
  const NodeId dest = topo.destination(flow);
  const ResourceId c = best_resource(state, flow, dest);
  return Route{flow, {topo.source(flow), dest}, {c}};
}

std::vector<int> widest_path(const std::vector<double>& weights, int n, int from, int to) {
  constexpr double kUnreached = -1.0;
  std::vector<double> width(static_cast<std::size_t>(n), kUnreached);
  std::vector<int> pred(static_cast<std::size_t>(n), -1);
  std::vector<char> done(static_cast<std::size_t>(n), 0);
  width[static_cast<std::size_t>(from)] = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < n; ++iter) {
    int u = -1;
    for (int v = 0; v < n; ++v) {
      if (done[static_cast<std::size_t>(v)] || width[static_cast<std::size_t>(v)] <= 0.0) continue;
      if (u < 0 || width[static_cast<std::size_t>(v)] > width[static_cast<std::size_t>(u)]) u = v;
    }
    if (u < 0) break;
    done[static_cast<std::size_t>(u)] = 1;
    if (u == to) break;
    for (int v = 0; v < n; ++v) {
      if (done[static_cast<std::size_t>(v)]) continue;
      const double w = weights[static_cast<std::size_t>(u) * static_cast<std::size_t>(n) + static_cast<std::size_t>(v)];
      if (w <= 0.0) continue;
      const double cand = std::min(width[static_cast<std::size_t>(u)], w);
      if (cand > width[static_cast<std::size_t>(v)]) {
        width[static_cast<std::size_t>(v)] = cand;
        pred[static_cast<std::size_t>(v)] = u;
      }
    }
  }
  if (!done[static_cast<std::size_t>(to)]) return {};
  std::vector<int> path;
  for (int v = to; v != -1; v = pred[static_cast<std::size_t>(v)]) path.push_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

Hop widest_path_step(const NetworkState& state, FlowId flow) {
  const Topology& topo = state.topology();
  const Route& route = state.route(flow);
  const NodeId frontier = route.head();
  const NodeId dest = topo.destination(flow);
  if (frontier == dest || state.status(flow) != FlowStatus::pending) {
    throw Error("widest_path_step: flow is not under construction");
  }
  const int n = topo.node_count();
  const int resources = state.resource_count();

  std::vector<char> usable(static_cast<std::size_t>(n), 0);
  std::vector<std::vector<char>> blocked(static_cast<std::size_t>(n));
  for (NodeId v = 0; v < n; ++v) {
    const auto owner = topo.endpoint_flow(v);
    const bool endpoint_ok = !owner || (*owner == flow && v == dest);
    usable[static_cast<std::size_t>(v)] = v == frontier || (endpoint_ok && !route.contains(v));
    if (usable[static_cast<std::size_t>(v)]) blocked[static_cast<std::size_t>(v)] = blocked_resources(state, flow, v);
  }

  std::vector<double> weights(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
  for (NodeId u = 0; u < n; ++u) {
    if (!usable[static_cast<std::size_t>(u)] || u == dest) continue;
    for (NodeId v = 0; v < n; ++v) {
      if (v == u || v == frontier || !usable[static_cast<std::size_t>(v)]) continue;
      double best = 0.0;
      for (ResourceId c = 0; c < resources; ++c) {
        if (u == frontier) {
          if (!hop_admissible(state, flow, v, c)) continue;
        } else if (blocked[static_cast<std::size_t>(u)][static_cast<std::size_t>(c)] ||
                   blocked[static_cast<std::size_t>(v)][static_cast<std::size_t>(c)]) {
          continue;
        }
        best = std::max(best, link_rate(state, flow, u, v, c));
      }
      weights[static_cast<std::size_t>(u) * static_cast<std::size_t>(n) + static_cast<std::size_t>(v)] = best;
    }
  }

  const auto path = widest_path(weights, n, frontier, dest);
  if (path.size() < 2) throw RoutingError(RoutingFailure::disconnected);
  const NodeId next = path[1];
  return {next, best_resource(state, flow, next)};
}

namespace {

class NeighborBaseline final : public StepPolicy {
 public:
  using StepFn = Hop (*)(const NetworkState&, FlowId, const NeighborSet&);
  NeighborBaseline(Baseline kind, StepFn fn) : kind_(kind), fn_(fn) {}

  Hop next_hop(const NetworkState& state, FlowId flow, const NeighborSet* neighbors) override {
    if (!neighbors) throw Error("baseline needs a neighbor set");
    return fn_(state, flow, *neighbors);
  }
  std::string name() const override { return std::string(to_string(kind_)); }

 private:
  Baseline kind_;
  StepFn fn_;
};

class DirectPolicy final : public StepPolicy {
 public:
  Hop next_hop(const NetworkState& state, FlowId flow, const NeighborSet*) override {
    const NodeId dest = state.topology().destination(flow);
    return {dest, best_resource(state, flow, dest)};
  }
  bool uses_neighbor_set() const override { return false; }
  std::string name() const override { return std::string(to_string(Baseline::destination_direct)); }
};

class WidestPathPolicy final : public StepPolicy {
 public:
  Hop next_hop(const NetworkState& state, FlowId flow, const NeighborSet*) override {
    return widest_path_step(state, flow);
  }
  bool uses_neighbor_set() const override { return false; }
  std::string name() const override { return std::string(to_string(Baseline::widest_path)); }
};

}  // namespace

std::unique_ptr<StepPolicy> make_baseline(Baseline b) {
  switch (b) {
    case Baseline::best_direction:
      return std::make_unique<NeighborBaseline>(b, &best_direction_step);
    case Baseline::closest_to_destination:
      return std::make_unique<NeighborBaseline>(b, &closest_to_destination_step);
    case Baseline::least_interfered:
      return std::make_unique<NeighborBaseline>(b, &least_interfered_step);
    case Baseline::largest_rate:
      return std::make_unique<NeighborBaseline>(b, &largest_rate_step);
    case Baseline::destination_direct:
      return std::make_unique<DirectPolicy>();
    case Baseline::widest_path:
      return std::make_unique<WidestPathPolicy>();
  }
  throw Error("unknown baseline");
}

}  // namespace hwnroute
