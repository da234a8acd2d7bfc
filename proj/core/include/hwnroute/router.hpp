#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hwnroute/error.hpp"
#include "hwnroute/policy.hpp"
#include "hwnroute/selection.hpp"

namespace hwnroute {

struct RouteOptions {
  NeighborStrategy strategy = NeighborStrategy::distance;
  int neighbors = 10;
  /// Maximum hops per route; 0 selects max(2E, 1).
  int hop_cap = 0;
  /// Keep the flow's destination in every neighbor set.
  bool include_destination = true;
};

int effective_hop_cap(const NetworkState& state, const RouteOptions& options);

struct BuildResult {
  bool complete = false;
  std::optional<RoutingFailure> failure;
  std::size_t hops = 0;
};

/// Tears the flow down to its source and extends it hop by hop with
/// `policy` until it reaches the destination. On a dead end or the hop cap
/// the flow is torn down and marked failed. Throws Error if the policy
/// returns an inadmissible hop.
BuildResult build_route(NetworkState& state, FlowId flow, StepPolicy& policy, const RouteOptions& options);

/// One policy per flow (index = flow id).
using PolicyTable = std::span<StepPolicy* const>;

/// Tears down every flow in `order`, then routes them one at a time in that
/// order, so later flows see the interference and resource commitments of
/// earlier ones.
std::vector<BuildResult> establish_all(NetworkState& state, PolicyTable policies,
                                       std::span<const FlowId> order, const RouteOptions& options);

/// establish_all in ascending flow id.
std::vector<BuildResult> establish_all(NetworkState& state, PolicyTable policies, const RouteOptions& options);

/// Flow order for one re-establishment round: descending achieved rate
/// (failed flows count 0), ties by ascending flow id.
std::vector<FlowId> reestablish_order(const NetworkState& state);

/// `rounds` passes of tearing down and re-routing every flow in
/// reestablish_order().
void reestablish(NetworkState& state, PolicyTable policies, const RouteOptions& options, int rounds = 4);

struct BruteForceLimits {
  int max_relays = 6;
  int max_resources = 3;
  int max_flows = 2;
  std::size_t max_evaluations = 20'000'000;
};

struct BruteForceResult {
  std::vector<Route> routes;
  double sum_rate = 0.0;
  std::size_t evaluated = 0;
};

/// Number of constraint-respecting (simple path, resource assignment)
/// routes for one flow, ignoring other flows.
std::size_t count_candidate_routes(const NetworkState& state, FlowId flow);

/// Exhaustive maximum of the sum rate over every joint route and resource
/// assignment that satisfies all route constraints. Throws Error when the
/// instance exceeds `limits`.
BruteForceResult brute_force_optimal(const NetworkState& state, const BruteForceLimits& limits = {});

}  // namespace hwnroute
