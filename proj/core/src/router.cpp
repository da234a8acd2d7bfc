#include "hwnroute/router.hpp"

#include <algorithm>
#include <numeric>

namespace hwnroute {

int effective_hop_cap(const NetworkState& state, const RouteOptions& options) {
  if (options.hop_cap > 0) return options.hop_cap;
  return std::max(2 * state.topology().relay_count(), 1);
}

BuildResult build_route(NetworkState& state, FlowId flow, StepPolicy& policy, const RouteOptions& options) {
  const NodeId dest = state.topology().destination(flow);
  const int cap = effective_hop_cap(state, options);
  state.reset_route(flow);

  BuildResult result;
  while (state.frontier(flow) != dest) {
    if (static_cast<int>(state.route(flow).hop_count()) >= cap) {
      state.mark_failed(flow);
      result.failure = RoutingFailure::hop_cap;
      return result;
    }
    Hop hop;
    try {
      if (policy.uses_neighbor_set()) {
        const NeighborSet ns = select_neighbors(options.strategy, state, flow, options.neighbors, options.include_destination);
        hop = policy.next_hop(state, flow, &ns);
      } else {
        hop = policy.next_hop(state, flow, nullptr);
      }
    } catch (const RoutingError& e) {
      state.mark_failed(flow);
      result.failure = e.cause();
      return result;
    }
    if (!hop_admissible(state, flow, hop.next, hop.resource)) {
      throw Error("policy '" + policy.name() + "' produced an inadmissible hop");
    }
    state.commit_hop(flow, hop.next, hop.resource);
    ++result.hops;
  }
  result.complete = true;
  return result;
}

std::vector<BuildResult> establish_all(NetworkState& state, PolicyTable policies,
                                       std::span<const FlowId> order, const RouteOptions& options) {
  if (static_cast<int>(policies.size()) != state.flow_count()) {
    throw Error("establish_all: need one policy per flow");
  }
  for (FlowId f : order) state.reset_route(f);
  std::vector<BuildResult> results(static_cast<std::size_t>(state.flow_count()));
  for (FlowId f : order) {
    results[static_cast<std::size_t>(f)] = build_route(state, f, *policies[static_cast<std::size_t>(f)], options);
  }
  return results;
}

std::vector<BuildResult> establish_all(NetworkState& state, PolicyTable policies, const RouteOptions& options) {
  std::vector<FlowId> order(static_cast<std::size_t>(state.flow_count()));
  std::iota(order.begin(), order.end(), 0);
  return establish_all(state, policies, order, options);
}

std::vector<FlowId> reestablish_order(const NetworkState& state) {
  const auto rates = flow_rates(state);
  std::vector<FlowId> order(rates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](FlowId a, FlowId b) {
    return rates[static_cast<std::size_t>(a)] > rates[static_cast<std::size_t>(b)];
  });
  return order;
}

void reestablish(NetworkState& state, PolicyTable policies, const RouteOptions& options, int rounds) {
  if (static_cast<int>(policies.size()) != state.flow_count()) {
    throw Error("reestablish: need one policy per flow");
  }
  for (int round = 0; round < rounds; ++round) {
    for (FlowId f : reestablish_order(state)) {
      build_route(state, f, *policies[static_cast<std::size_t>(f)], options);
    }
  }
}

// ------------------------------------------------------------- brute force

namespace {

template <typename Visit>
void enumerate_routes(const NetworkState& state, FlowId flow, Visit&& visit) {
  const Topology& topo = state.topology();
  const int relays = topo.relay_count();
  const int resources = state.resource_count();
  const NodeId dest = topo.destination(flow);

  Route r{flow, {topo.source(flow)}, {}};
  std::vector<char> used(static_cast<std::size_t>(relays), 0);

  auto extend = [&](auto&& self) -> void {
    const ResourceId prev = r.hops.empty() ? -1 : r.hops.back();
    for (NodeId next = 0; next < relays; ++next) {
      if (used[static_cast<std::size_t>(next)]) continue;
      used[static_cast<std::size_t>(next)] = 1;
      for (ResourceId c = 0; c < resources; ++c) {
        if (c == prev) continue;
        r.nodes.push_back(next);
        r.hops.push_back(c);
        self(self);
        r.nodes.pop_back();
        r.hops.pop_back();
      }
      used[static_cast<std::size_t>(next)] = 0;
    }
    for (ResourceId c = 0; c < resources; ++c) {
      if (c == prev) continue;
      r.nodes.push_back(dest);
      r.hops.push_back(c);
      visit(static_cast<const Route&>(r));
      r.nodes.pop_back();
      r.hops.pop_back();
    }
  };
  extend(extend);
}

bool shared_relays_compatible(const Route& a, const Route& b) {
  for (std::size_t i = 1; i + 1 < a.nodes.size(); ++i) {
    for (std::size_t j = 1; j + 1 < b.nodes.size(); ++j) {
      if (a.nodes[i] != b.nodes[j]) continue;
      const ResourceId ai = a.hops[i - 1], ao = a.hops[i];
      const ResourceId bi = b.hops[j - 1], bo = b.hops[j];
      if (ai == bi || ai == bo || ao == bi || ao == bo) return false;
    }
  }
  return true;
}

}  // namespace

std::size_t count_candidate_routes(const NetworkState& state, FlowId flow) {
  std::size_t count = 0;
  enumerate_routes(state, flow, [&](const Route&) { ++count; });
  return count;
}

BruteForceResult brute_force_optimal(const NetworkState& state, const BruteForceLimits& limits) {
  const Topology& topo = state.topology();
  if (topo.relay_count() > limits.max_relays || state.resource_count() > limits.max_resources ||
      state.flow_count() > limits.max_flows || state.flow_count() < 1) {
    throw Error("instance exceeds enumeration cap");
  }

  NetworkState scratch = state;
  BruteForceResult best;
  best.sum_rate = -1.0;

  if (state.flow_count() == 1) {
    if (count_candidate_routes(state, 0) > limits.max_evaluations) throw Error("instance exceeds enumeration cap");
    for (FlowId f = 0; f < scratch.flow_count(); ++f) scratch.reset_route(f);
    enumerate_routes(scratch, 0, [&](const Route& r) {
      ++best.evaluated;
      const double rate = route_rate(scratch, r);
      if (rate > best.sum_rate) {
        best.sum_rate = rate;
        best.routes = {r};
      }
    });
    return best;
  }

  std::vector<Route> first;
  std::vector<Route> second;
  enumerate_routes(state, 0, [&](const Route& r) { first.push_back(r); });
  enumerate_routes(state, 1, [&](const Route& r) { second.push_back(r); });
  if (first.size() * second.size() > limits.max_evaluations) throw Error("instance exceeds enumeration cap");

  for (const Route& a : first) {
    for (const Route& b : second) {
      if (!shared_relays_compatible(a, b)) continue;
      ++best.evaluated;
      scratch.set_route(a);
      scratch.set_route(b);
      const double total = route_rate(scratch, 0) + route_rate(scratch, 1);
      if (total > best.sum_rate) {
        best.sum_rate = total;
        best.routes = {a, b};
      }
    }
  }
  return best;
}

}  // namespace hwnroute
