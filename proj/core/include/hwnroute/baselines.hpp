#pragma once

#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "hwnroute/policy.hpp"

namespace hwnroute {

enum class Baseline {
  best_direction,
  closest_to_destination,
  least_interfered,
  largest_rate,
  destination_direct,
  widest_path,
};

inline constexpr Baseline kAllBaselines[] = {
    Baseline::best_direction, Baseline::closest_to_destination, Baseline::least_interfered,
    Baseline::largest_rate,   Baseline::destination_direct,     Baseline::widest_path,
};

std::string_view to_string(Baseline b);
std::optional<Baseline> parse_baseline(std::string_view name);

/// Highest-rate admissible resource for frontier(flow) -> next under current
/// interference; lowest id on ties. Throws RoutingError(dead_end) if none.
ResourceId best_resource(const NetworkState& state, FlowId flow, NodeId next);

/// Neighbor whose direction from the frontier deviates least from the
/// direction to the destination.
Hop best_direction_step(const NetworkState& state, FlowId flow, const NeighborSet& neighbors);

/// Neighbor nearest to the destination.
Hop closest_to_destination_step(const NetworkState& state, FlowId flow, const NeighborSet& neighbors);

/// (neighbor, resource) with the least interference power at the neighbor.
/// Ties go to the lowest resource id, then the lowest node id.
Hop least_interfered_step(const NetworkState& state, FlowId flow, const NeighborSet& neighbors);

/// (neighbor, resource) with the largest link rate, same tie rule.
Hop largest_rate_step(const NetworkState& state, FlowId flow, const NeighborSet& neighbors);

/// Single hop from the source straight to the destination.
Route destination_direct(const NetworkState& state, FlowId flow);

/// First hop of the widest (maximum-bottleneck) path from the frontier to
/// the destination over the full graph, edges weighted by the best link
/// rate over resources under current interference. Throws
/// RoutingError(disconnected) when the destination is unreachable.
Hop widest_path_step(const NetworkState& state, FlowId flow);

/// Maximum-bottleneck path on a dense directed weight matrix (row-major,
/// `n` x `n`, weight <= 0 means no edge). Returns the node sequence from
/// `from` to `to`, or an empty vector if `to` is unreachable. Ties are
/// resolved toward lower node ids.
std::vector<int> widest_path(const std::vector<double>& weights, int n, int from, int to);

std::unique_ptr<StepPolicy> make_baseline(Baseline b);

}  // namespace hwnroute
