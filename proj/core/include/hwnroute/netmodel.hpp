#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hwnroute/channel.hpp"
#include "hwnroute/geometry.hpp"

namespace hwnroute {

using NodeId = int;
using FlowId = int;

struct FlowEndpoints {
  Vec3 source;
  Vec3 destination;
};

/// Node placement. Node ids are laid out as relays [0, E) followed by one
/// (source, destination) pair per flow: source(f) = E + 2f and
/// destination(f) = E + 2f + 1. Endpoints belong to their flow only.
class Topology {
 public:
  Topology() = default;
  Topology(std::vector<Vec3> relays, std::vector<FlowEndpoints> flows, Area area,
           std::uint64_t seed = 0);

  int relay_count() const { return relays_; }
  int flow_count() const { return flows_; }
  int node_count() const { return static_cast<int>(positions_.size()); }

  NodeId source(FlowId f) const { return relays_ + 2 * f; }
  NodeId destination(FlowId f) const { return relays_ + 2 * f + 1; }
  bool is_relay(NodeId n) const { return n >= 0 && n < relays_; }
  /// Flow owning endpoint `n`, or nullopt for relays.
  std::optional<FlowId> endpoint_flow(NodeId n) const;

  Vec3 position(NodeId n) const { return positions_.at(static_cast<std::size_t>(n)); }
  std::span<const Vec3> positions() const { return positions_; }
  void set_position(NodeId n, Vec3 p);

  const Area& area() const { return area_; }
  std::uint64_t seed() const { return seed_; }

  /// Optional mapping from node id to gain-grid site, used with grid channels.
  const std::vector<int>& sites() const { return sites_; }
  void set_sites(std::vector<int> sites);

 private:
  std::vector<Vec3> positions_;
  int relays_ = 0;
  int flows_ = 0;
  Area area_;
  std::uint64_t seed_ = 0;
  std::vector<int> sites_;
};

/// Ordered node sequence for one flow plus the resource used on each hop.
/// A partial route ends at its frontier; a complete one at the destination.
struct Route {
  FlowId flow = 0;
  std::vector<NodeId> nodes;
  std::vector<ResourceId> hops;

  std::size_t hop_count() const { return hops.size(); }
  NodeId head() const { return nodes.back(); }
  bool contains(NodeId n) const;
  friend bool operator==(const Route&, const Route&) = default;
};

enum class NoiseMode { density, total };

struct RadioParams {
  double tx_power_w = 1e-3;
  /// W/Hz in density mode, W in total mode.
  double noise = 1e-20;
  NoiseMode noise_mode = NoiseMode::density;
  /// When false, links see noise only (used for noise-limited analyses).
  bool interference = true;

  /// Density mode reads `noise_dbm` as dBm per MHz.
  static RadioParams from_dbm(double tx_power_dbm, double noise_dbm, NoiseMode mode);
  double noise_power(const CommResource& resource) const;
};

enum class FlowStatus { pending, complete, failed };

/// Topology, resources, radio constants and the (possibly partial) routes of
/// every flow. Channel power gains are cached per snapshot; moving a node
/// refreshes the cache.
class NetworkState {
 public:
  NetworkState(Topology topology, ResourceSet resources, RadioParams radio, ChannelSource channel);

  const Topology& topology() const { return topology_; }
  const ResourceSet& resources() const { return resources_; }
  const RadioParams& radio() const { return radio_; }
  const ChannelSource& channel() const { return channel_; }
  int flow_count() const { return topology_.flow_count(); }
  int resource_count() const { return resources_.size(); }

  /// |h|^2 from the snapshot cache.
  double power_gain(NodeId tx, NodeId rx, ResourceId c) const {
    return gains_[(static_cast<std::size_t>(tx) * n_ + static_cast<std::size_t>(rx)) * r_ +
                  static_cast<std::size_t>(c)];
  }
  /// Complex gain, including phase.
  std::complex<double> channel_gain(NodeId tx, NodeId rx, ResourceId c) const;

  const Route& route(FlowId f) const { return routes_.at(static_cast<std::size_t>(f)); }
  std::span<const Route> routes() const { return routes_; }
  FlowStatus status(FlowId f) const { return status_.at(static_cast<std::size_t>(f)); }
  NodeId frontier(FlowId f) const { return route(f).head(); }

  /// Tears the flow down to its source (pending).
  void reset_route(FlowId f);
  /// Tears the flow down and marks it failed; failed flows carry rate 0.
  void mark_failed(FlowId f);
  /// Appends frontier -> next on resource c. No constraint checks here;
  /// see hop_admissible() and validate().
  void commit_hop(FlowId f, NodeId next, ResourceId c);
  /// Replaces a flow's route wholesale.
  void set_route(Route route);

  void set_radio(const RadioParams& radio) { radio_ = radio; }
  void move_node(NodeId n, Vec3 p);
  void set_positions(std::span<const Vec3> positions);

 private:
  void refresh_gains();
  void refresh_pair(NodeId i, NodeId j);
  std::uint64_t link_seed(NodeId a, NodeId b, const CommResource& res) const;

  Topology topology_;
  ResourceSet resources_;
  RadioParams radio_;
  ChannelSource channel_;
  std::vector<Route> routes_;
  std::vector<FlowStatus> status_;
  std::size_t n_ = 0;
  std::size_t r_ = 0;
  std::vector<double> gains_;
};

struct LinkMeasurement {
  NodeId tx = 0;
  NodeId rx = 0;
  ResourceId resource = 0;
  double signal_power = 0.0;
  double ifi_power = 0.0;
  double ihi_power = 0.0;
  double noise_power = 0.0;
  double sinr = 0.0;
  double rate = 0.0;
};

/// SINR of tx -> rx on resource c for a link belonging to `flow`, against
/// every committed transmission in the state. Co-resource transmitters of
/// other flows count as inter-flow interference, other hops of the same flow
/// as intra-flow interference. A receiver that itself transmits on c sees
/// infinite interference.
LinkMeasurement sinr(const NetworkState& state, FlowId flow, NodeId tx, NodeId rx, ResourceId c);

/// Same, but with `flow`'s committed hops replaced by those of `route`.
LinkMeasurement sinr(const NetworkState& state, const Route& route, NodeId tx, NodeId rx, ResourceId c);

/// Omega_c log2(1 + SINR).
double link_rate(const NetworkState& state, FlowId flow, NodeId tx, NodeId rx, ResourceId c);

/// Total received power at `node` on c from committed transmissions of
/// other nodes (all flows).
double interference_at(const NetworkState& state, NodeId node, ResourceId c);

/// Bottleneck rate of a complete route under full network interference,
/// with the route's own hops standing in for its flow's committed hops.
/// Throws Error on an incomplete route.
double route_rate(const NetworkState& state, const Route& route);
double route_rate(const NetworkState& state, FlowId f);

/// Sum of route rates; throws if any flow is not complete.
double sum_rate(const NetworkState& state);

/// Per-flow route rate with non-complete (failed or pending) flows at 0.
std::vector<double> flow_rates(const NetworkState& state);
double achieved_sum_rate(const NetworkState& state);

enum class ViolationKind { malformed, cycle, half_duplex, shared_relay_clash, foreign_endpoint };

struct Violation {
  ViolationKind kind;
  FlowId flow;
  NodeId node;
  std::string message;
};

/// Checks no-revisit, consecutive-resource, shared-relay and endpoint
/// constraints across every route. Empty result iff all hold.
std::vector<Violation> validate(const NetworkState& state);

// Admissibility of the next hop for a flow under construction.

/// Resources used (in or out) at `node` by flows other than `flow`.
std::vector<char> blocked_resources(const NetworkState& state, FlowId flow, NodeId node);

/// Whether frontier(flow) -> rx on c keeps every route constraint satisfied.
bool hop_admissible(const NetworkState& state, FlowId flow, NodeId rx, ResourceId c);

/// Resources c for which hop_admissible(flow, rx, c) holds, ascending.
std::vector<ResourceId> admissible_resources(const NetworkState& state, FlowId flow, NodeId rx);

/// A node can be chosen as next hop: it is not the frontier, not already on
/// the flow, not another flow's endpoint, some resource reaches it, and
/// (unless it is the destination) some other resource can leave it.
bool node_eligible(const NetworkState& state, FlowId flow, NodeId node);

std::vector<NodeId> eligible_nodes(const NetworkState& state, FlowId flow);

}  // namespace hwnroute
