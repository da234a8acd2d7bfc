#include "hwnroute/selection.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "hwnroute/error.hpp"

namespace hwnroute {

std::string_view to_string(NeighborStrategy s) {
  switch (s) {
    case NeighborStrategy::distance:
      return "distance";
    case NeighborStrategy::channel:
      return "channel";
    case NeighborStrategy::rate:
      return "rate";
  }
  return "unknown";
}

std::optional<NeighborStrategy> parse_neighbor_strategy(std::string_view name) {
  if (name == "distance") return NeighborStrategy::distance;
  if (name == "channel") return NeighborStrategy::channel;
  if (name == "rate") return NeighborStrategy::rate;
  return std::nullopt;
}

namespace {

// Keeps the `count` best nodes under `score`, where larger is better.
template <typename Score>
NeighborSet rank(const NetworkState& state, FlowId flow, int count, bool include_destination,
                 NeighborStrategy strategy, Score&& score) {
  const auto eligible = eligible_nodes(state, flow);
  if (eligible.empty()) throw RoutingError(RoutingFailure::dead_end);

  std::vector<std::pair<double, NodeId>> scored;
  scored.reserve(eligible.size());
  for (NodeId n : eligible) scored.emplace_back(score(n), n);
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });

  NeighborSet out;
  out.frontier = state.frontier(flow);
  out.strategy = strategy;
  const auto keep = std::min<std::size_t>(scored.size(), static_cast<std::size_t>(std::max(count, 0)));
  for (std::size_t i = 0; i < keep; ++i) out.neighbors.push_back(scored[i].second);

  const NodeId dest = state.topology().destination(flow);
  const bool eligible_dest = std::find(eligible.begin(), eligible.end(), dest) != eligible.end();
  const bool listed = std::find(out.neighbors.begin(), out.neighbors.end(), dest) != out.neighbors.end();
  if (include_destination && eligible_dest && !listed && count > 0) {
    if (out.neighbors.size() == static_cast<std::size_t>(count)) {
      out.neighbors.back() = dest;
    } else {
      out.neighbors.push_back(dest);
    }
  }
  return out;
}

}  // namespace

NeighborSet select_distance(const NetworkState& state, FlowId flow, int count, bool include_destination) {
  const Topology& topo = state.topology();
  const Vec3 here = topo.position(state.frontier(flow));
  return rank(state, flow, count, include_destination, NeighborStrategy::distance,
              [&](NodeId n) { return -distance(here, topo.position(n)); });
}

NeighborSet select_channel(const NetworkState& state, FlowId flow, int count, bool include_destination) {
  const NodeId e = state.frontier(flow);
  const int resources = state.resource_count();
  return rank(state, flow, count, include_destination, NeighborStrategy::channel, [&](NodeId n) {
    double sum = 0.0;
    for (ResourceId c = 0; c < resources; ++c) sum += std::sqrt(state.power_gain(e, n, c));
    return sum / resources;
  });
}

NeighborSet select_rate(const NetworkState& state, FlowId flow, int count, bool include_destination) {
  const NodeId e = state.frontier(flow);
  const int resources = state.resource_count();
  return rank(state, flow, count, include_destination, NeighborStrategy::rate, [&](NodeId n) {
    double sum = 0.0;
    for (ResourceId c = 0; c < resources; ++c) sum += link_rate(state, flow, e, n, c);
    return sum / resources;
  });
}

NeighborSet select_neighbors(NeighborStrategy strategy, const NetworkState& state, FlowId flow, int count,
                             bool include_destination) {
  switch (strategy) {
    case NeighborStrategy::distance:
      return select_distance(state, flow, count, include_destination);
    case NeighborStrategy::channel:
      return select_channel(state, flow, count, include_destination);
    case NeighborStrategy::rate:
      return select_rate(state, flow, count, include_destination);
  }
  throw Error("unknown neighbor strategy");
}

}  // namespace hwnroute
