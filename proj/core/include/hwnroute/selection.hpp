#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hwnroute/netmodel.hpp"

namespace hwnroute {

enum class NeighborStrategy { distance, channel, rate };

std::string_view to_string(NeighborStrategy s);
std::optional<NeighborStrategy> parse_neighbor_strategy(std::string_view name);

/// Candidate next hops at the frontier of a flow, best-ranked first.
struct NeighborSet {
  NodeId frontier = 0;
  std::vector<NodeId> neighbors;
  NeighborStrategy strategy = NeighborStrategy::distance;
};

// All three rank the eligible nodes (see node_eligible) at the flow's
// frontier and keep the best `count`, breaking ties by ascending node id.
// With `include_destination`, an eligible destination that did not make the
// cut takes the last slot (or is appended when fewer than `count` nodes are
// eligible), so the destination is always a candidate and the set never
// exceeds `count`. They throw RoutingError(dead_end) when nothing is eligible.

/// Smallest Euclidean distance to the frontier first.
NeighborSet select_distance(const NetworkState& state, FlowId flow, int count, bool include_destination = true);
/// Largest mean channel amplitude |h| over all resources first.
NeighborSet select_channel(const NetworkState& state, FlowId flow, int count, bool include_destination = true);
/// Largest mean link rate over all resources, under current interference.
NeighborSet select_rate(const NetworkState& state, FlowId flow, int count, bool include_destination = true);

NeighborSet select_neighbors(NeighborStrategy strategy, const NetworkState& state, FlowId flow, int count,
                             bool include_destination = true);

}  // namespace hwnroute
