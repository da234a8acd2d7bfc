#include "hwnroute/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hwnroute/error.hpp"
#include "hwnroute/gain_grid.hpp"
#include "hwnroute/seed.hpp"

namespace hwnroute {

// ---------------------------------------------------------------- Topology

Topology::Topology(std::vector<Vec3> relays, std::vector<FlowEndpoints> flows, Area area,
                   std::uint64_t seed)
    : relays_(static_cast<int>(relays.size())),
      flows_(static_cast<int>(flows.size())),
      area_(area),
      seed_(seed) {
  positions_ = std::move(relays);
  for (const FlowEndpoints& f : flows) {
    positions_.push_back(f.source);
    positions_.push_back(f.destination);
  }
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    if (!area_.contains(positions_[i])) {
      throw Error("node " + std::to_string(i) + " lies outside the area bounds");
    }
  }
}

std::optional<FlowId> Topology::endpoint_flow(NodeId n) const {
  if (n < relays_ || n >= node_count()) return std::nullopt;
  return (n - relays_) / 2;
}

void Topology::set_position(NodeId n, Vec3 p) {
  if (!area_.contains(p)) throw Error("node " + std::to_string(n) + " moved outside the area bounds");
  positions_.at(static_cast<std::size_t>(n)) = p;
}

void Topology::set_sites(std::vector<int> sites) {
  if (!sites.empty() && static_cast<int>(sites.size()) != node_count()) {
    throw Error("site map size does not match node count");
  }
  sites_ = std::move(sites);
}

bool Route::contains(NodeId n) const {
  return std::find(nodes.begin(), nodes.end(), n) != nodes.end();
}

// ------------------------------------------------------------- RadioParams

RadioParams RadioParams::from_dbm(double tx_power_dbm, double noise_dbm, NoiseMode mode) {
  RadioParams p;
  p.tx_power_w = std::pow(10.0, (tx_power_dbm - 30.0) / 10.0);
  const double noise_w = std::pow(10.0, (noise_dbm - 30.0) / 10.0);
  p.noise = mode == NoiseMode::density ? noise_w / 1e6 : noise_w;
  p.noise_mode = mode;
  return p;
}

double RadioParams::noise_power(const CommResource& resource) const {
  return noise_mode == NoiseMode::density ? resource.bandwidth_hz * noise : noise;
}

// ------------------------------------------------------------ NetworkState

NetworkState::NetworkState(Topology topology, ResourceSet resources, RadioParams radio,
                           ChannelSource channel)
    : topology_(std::move(topology)),
      resources_(std::move(resources)),
      radio_(radio),
      channel_(std::move(channel)) {
  if (resources_.size() == 0) throw Error("network needs at least one communication resource");
  if (channel_.is_grid()) {
    if (channel_.grid().resource_count() != resources_.size()) {
      throw Error("gain grid resource count does not match the resource set");
    }
    const auto& sites = topology_.sites();
    const int limit = channel_.grid().node_count();
    for (NodeId n = 0; n < topology_.node_count(); ++n) {
      const int site = sites.empty() ? n : sites[static_cast<std::size_t>(n)];
      if (site < 0 || site >= limit) throw Error("node " + std::to_string(n) + " has no gain-grid site");
    }
  } else if (static_cast<int>(channel_.model().per_tech.size()) < resources_.tech_count()) {
    throw Error("channel model is missing per-technology parameters");
  }
  routes_.resize(static_cast<std::size_t>(topology_.flow_count()));
  status_.assign(routes_.size(), FlowStatus::pending);
  for (FlowId f = 0; f < topology_.flow_count(); ++f) reset_route(f);
  n_ = static_cast<std::size_t>(topology_.node_count());
  r_ = static_cast<std::size_t>(resources_.size());
  refresh_gains();
}

std::uint64_t NetworkState::link_seed(NodeId a, NodeId b, const CommResource& res) const {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return derive_seed(topology_.seed(), {lo, hi, static_cast<std::uint64_t>(res.tech_index)});
}

std::complex<double> NetworkState::channel_gain(NodeId tx, NodeId rx, ResourceId c) const {
  if (channel_.is_grid()) {
    const auto& sites = topology_.sites();
    const int a = sites.empty() ? tx : sites[static_cast<std::size_t>(tx)];
    const int b = sites.empty() ? rx : sites[static_cast<std::size_t>(rx)];
    return channel_.grid().at(a, b, c);
  }
  const CommResource& res = resources_[c];
  return gain(channel_.model(), topology_.position(tx), topology_.position(rx), res,
              link_seed(tx, rx, res));
}

void NetworkState::refresh_pair(NodeId i, NodeId j) {
  const std::size_t ij = (static_cast<std::size_t>(i) * n_ + static_cast<std::size_t>(j)) * r_;
  const std::size_t ji = (static_cast<std::size_t>(j) * n_ + static_cast<std::size_t>(i)) * r_;
  for (ResourceId c = 0; c < resources_.size(); ++c) {
    const CommResource& res = resources_[c];
    double g = 0.0;
    if (channel_.is_grid()) {
      g = std::norm(channel_gain(i, j, c));
    } else if (res.subband_index > 0) {
      // Subbands of one technology share its channel.
      g = gains_[ij + static_cast<std::size_t>(c - res.subband_index)];
    } else {
      g = hwnroute::power_gain(channel_.model(), topology_.position(i), topology_.position(j), res,
                               link_seed(i, j, res));
    }
    gains_[ij + static_cast<std::size_t>(c)] = g;
    gains_[ji + static_cast<std::size_t>(c)] = g;
  }
}

void NetworkState::refresh_gains() {
  gains_.assign(n_ * n_ * r_, 0.0);
  const int n = static_cast<int>(n_);
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) refresh_pair(i, j);
  }
}

void NetworkState::reset_route(FlowId f) {
  Route& r = routes_.at(static_cast<std::size_t>(f));
  r.flow = f;
  r.nodes.assign(1, topology_.source(f));
  r.hops.clear();
  status_[static_cast<std::size_t>(f)] = FlowStatus::pending;
}

void NetworkState::mark_failed(FlowId f) {
  reset_route(f);
  status_[static_cast<std::size_t>(f)] = FlowStatus::failed;
}

void NetworkState::commit_hop(FlowId f, NodeId next, ResourceId c) {
  if (next < 0 || next >= topology_.node_count()) throw Error("commit_hop: unknown node");
  if (!resources_.contains(c)) throw Error("commit_hop: unknown resource");
  Route& r = routes_.at(static_cast<std::size_t>(f));
  if (status_[static_cast<std::size_t>(f)] != FlowStatus::pending) {
    throw Error("commit_hop: flow " + std::to_string(f) + " is not under construction");
  }
  r.nodes.push_back(next);
  r.hops.push_back(c);
  if (next == topology_.destination(f)) status_[static_cast<std::size_t>(f)] = FlowStatus::complete;
}

void NetworkState::set_route(Route route) {
  const FlowId f = route.flow;
  if (f < 0 || f >= flow_count()) throw Error("set_route: unknown flow");
  if (route.nodes.empty() || route.nodes.front() != topology_.source(f) ||
      route.hops.size() + 1 != route.nodes.size()) {
    throw Error("set_route: malformed route");
  }
  const bool done = route.nodes.back() == topology_.destination(f);
  routes_[static_cast<std::size_t>(f)] = std::move(route);
  status_[static_cast<std::size_t>(f)] = done ? FlowStatus::complete : FlowStatus::pending;
}

void NetworkState::move_node(NodeId n, Vec3 p) {
  topology_.set_position(n, p);
  for (NodeId m = 0; m < static_cast<NodeId>(n_); ++m) {
    if (m != n) refresh_pair(std::min(m, n), std::max(m, n));
  }
}

void NetworkState::set_positions(std::span<const Vec3> positions) {
  if (static_cast<int>(positions.size()) != topology_.node_count()) {
    throw Error("set_positions: size mismatch");
  }
  for (NodeId n = 0; n < topology_.node_count(); ++n) {
    topology_.set_position(n, positions[static_cast<std::size_t>(n)]);
  }
  refresh_gains();
}

// ---------------------------------------------------------------- radio math

namespace {

template <typename Fn>
void for_each_transmission(const NetworkState& state, const Route* override_route, Fn&& fn) {
  for (const Route& stored : state.routes()) {
    const Route& r = (override_route && override_route->flow == stored.flow) ? *override_route : stored;
    for (std::size_t i = 0; i < r.hops.size(); ++i) fn(r.flow, r.nodes[i], r.nodes[i + 1], r.hops[i]);
  }
}

void check_link(const NetworkState& state, NodeId tx, NodeId rx, ResourceId c) {
  const int n = state.topology().node_count();
  if (tx < 0 || tx >= n || rx < 0 || rx >= n) throw Error("sinr: unknown node id");
  if (!state.resources().contains(c)) throw Error("sinr: unknown resource id");
  if (tx == rx) throw Error("sinr: transmitter and receiver coincide");
}

LinkMeasurement measure(const NetworkState& state, FlowId flow, const Route* override_route,
                        NodeId tx, NodeId rx, ResourceId c) {
  check_link(state, tx, rx, c);
  const RadioParams& radio = state.radio();
  const CommResource& res = state.resources()[c];

  LinkMeasurement m;
  m.tx = tx;
  m.rx = rx;
  m.resource = c;
  m.signal_power = radio.tx_power_w * state.power_gain(tx, rx, c);
  m.noise_power = radio.noise_power(res);
  if (radio.interference) {
    for_each_transmission(state, override_route,
                          [&](FlowId g, NodeId t, NodeId, ResourceId ck) {
                            if (ck != c) return;
                            if (g == flow && t == tx) return;
                            const double p = t == rx ? std::numeric_limits<double>::infinity()
                                                     : radio.tx_power_w * state.power_gain(t, rx, c);
                            if (g == flow) {
                              m.ihi_power += p;
                            } else {
                              m.ifi_power += p;
                            }
                          });
  }
  m.sinr = m.signal_power / (m.ifi_power + m.ihi_power + m.noise_power);
  m.rate = res.bandwidth_hz * std::log2(1.0 + m.sinr);
  return m;
}

bool route_complete(const NetworkState& state, const Route& route) {
  const Topology& topo = state.topology();
  return route.flow >= 0 && route.flow < state.flow_count() && route.nodes.size() >= 2 &&
         route.hops.size() + 1 == route.nodes.size() && route.nodes.front() == topo.source(route.flow) &&
         route.nodes.back() == topo.destination(route.flow);
}

}  // namespace

LinkMeasurement sinr(const NetworkState& state, FlowId flow, NodeId tx, NodeId rx, ResourceId c) {
  return measure(state, flow, nullptr, tx, rx, c);
}

LinkMeasurement sinr(const NetworkState& state, const Route& route, NodeId tx, NodeId rx, ResourceId c) {
  return measure(state, route.flow, &route, tx, rx, c);
}

double link_rate(const NetworkState& state, FlowId flow, NodeId tx, NodeId rx, ResourceId c) {
  return measure(state, flow, nullptr, tx, rx, c).rate;
}

double interference_at(const NetworkState& state, NodeId node, ResourceId c) {
  const RadioParams& radio = state.radio();
  if (!radio.interference) return 0.0;
  double total = 0.0;
  for_each_transmission(state, nullptr, [&](FlowId, NodeId t, NodeId, ResourceId ck) {
    if (ck == c && t != node) total += radio.tx_power_w * state.power_gain(t, node, c);
  });
  return total;
}

double route_rate(const NetworkState& state, const Route& route) {
  if (!route_complete(state, route)) throw Error("route_rate: incomplete route");
  double bottleneck = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < route.hops.size(); ++i) {
    bottleneck = std::min(bottleneck,
                          measure(state, route.flow, &route, route.nodes[i], route.nodes[i + 1], route.hops[i]).rate);
  }
  return bottleneck;
}

double route_rate(const NetworkState& state, FlowId f) { return route_rate(state, state.route(f)); }

double sum_rate(const NetworkState& state) {
  double total = 0.0;
  for (FlowId f = 0; f < state.flow_count(); ++f) {
    if (state.status(f) != FlowStatus::complete) {
      throw Error("sum_rate: flow " + std::to_string(f) + " is incomplete");
    }
    total += route_rate(state, f);
  }
  return total;
}

std::vector<double> flow_rates(const NetworkState& state) {
  std::vector<double> rates(static_cast<std::size_t>(state.flow_count()), 0.0);
  for (FlowId f = 0; f < state.flow_count(); ++f) {
    if (state.status(f) == FlowStatus::complete) rates[static_cast<std::size_t>(f)] = route_rate(state, f);
  }
  return rates;
}

double achieved_sum_rate(const NetworkState& state) {
  double total = 0.0;
  for (double r : flow_rates(state)) total += r;
  return total;
}

// ------------------------------------------------------------- constraints

namespace {

void adjacent_resources(const Route& r, std::size_t index, std::vector<ResourceId>& out) {
  if (index > 0) out.push_back(r.hops[index - 1]);
  if (index < r.hops.size()) out.push_back(r.hops[index]);
}

bool used_by_others(const NetworkState& state, FlowId flow, NodeId node, ResourceId c) {
  for (const Route& r : state.routes()) {
    if (r.flow == flow) continue;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
      if (r.nodes[i] != node) continue;
      if (i > 0 && r.hops[i - 1] == c) return true;
      if (i < r.hops.size() && r.hops[i] == c) return true;
    }
  }
  return false;
}

bool endpoint_ok(const Topology& topo, FlowId flow, NodeId node) {
  const auto owner = topo.endpoint_flow(node);
  return !owner || (*owner == flow && node == topo.destination(flow));
}

}  // namespace

std::vector<Violation> validate(const NetworkState& state) {
  std::vector<Violation> out;
  const Topology& topo = state.topology();
  const auto& routes = state.routes();

  for (const Route& r : routes) {
    const FlowId f = r.flow;
    if (r.nodes.empty() || r.nodes.front() != topo.source(f) || r.hops.size() + 1 != r.nodes.size()) {
      out.push_back({ViolationKind::malformed, f, r.nodes.empty() ? -1 : r.nodes.front(), "malformed route"});
      continue;
    }
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
      const NodeId n = r.nodes[i];
      if (std::find(r.nodes.begin(), r.nodes.begin() + static_cast<std::ptrdiff_t>(i), n) !=
          r.nodes.begin() + static_cast<std::ptrdiff_t>(i)) {
        out.push_back({ViolationKind::cycle, f, n, "cycle"});
      }
      const auto owner = topo.endpoint_flow(n);
      if (owner && *owner != f) out.push_back({ViolationKind::foreign_endpoint, f, n, "foreign endpoint"});
    }
    for (std::size_t i = 0; i + 1 < r.hops.size(); ++i) {
      if (r.hops[i] == r.hops[i + 1]) {
        out.push_back({ViolationKind::half_duplex, f, r.nodes[i + 1], "half-duplex"});
      }
    }
  }

  std::vector<ResourceId> a;
  std::vector<ResourceId> b;
  for (std::size_t f1 = 0; f1 < routes.size(); ++f1) {
    for (std::size_t f2 = f1 + 1; f2 < routes.size(); ++f2) {
      const Route& r1 = routes[f1];
      const Route& r2 = routes[f2];
      if (r1.hops.size() + 1 != r1.nodes.size() || r2.hops.size() + 1 != r2.nodes.size()) continue;
      for (std::size_t i = 0; i < r1.nodes.size(); ++i) {
        for (std::size_t j = 0; j < r2.nodes.size(); ++j) {
          if (r1.nodes[i] != r2.nodes[j]) continue;
          a.clear();
          b.clear();
          adjacent_resources(r1, i, a);
          adjacent_resources(r2, j, b);
          bool clash = false;
          for (ResourceId x : a) clash = clash || std::find(b.begin(), b.end(), x) != b.end();
          if (clash) {
            out.push_back({ViolationKind::shared_relay_clash, r2.flow, r1.nodes[i], "shared-relay resource clash"});
          }
        }
      }
    }
  }
  return out;
}

std::vector<char> blocked_resources(const NetworkState& state, FlowId flow, NodeId node) {
  std::vector<char> blocked(static_cast<std::size_t>(state.resource_count()), 0);
  for (const Route& r : state.routes()) {
    if (r.flow == flow) continue;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
      if (r.nodes[i] != node) continue;
      if (i > 0) blocked[static_cast<std::size_t>(r.hops[i - 1])] = 1;
      if (i < r.hops.size()) blocked[static_cast<std::size_t>(r.hops[i])] = 1;
    }
  }
  return blocked;
}

bool hop_admissible(const NetworkState& state, FlowId flow, NodeId rx, ResourceId c) {
  const Topology& topo = state.topology();
  if (state.status(flow) != FlowStatus::pending) return false;
  if (rx < 0 || rx >= topo.node_count() || !state.resources().contains(c)) return false;
  const Route& r = state.route(flow);
  const NodeId tx = r.head();
  if (rx == tx || r.contains(rx) || !endpoint_ok(topo, flow, rx)) return false;
  if (!r.hops.empty() && r.hops.back() == c) return false;
  return !used_by_others(state, flow, tx, c) && !used_by_others(state, flow, rx, c);
}

std::vector<ResourceId> admissible_resources(const NetworkState& state, FlowId flow, NodeId rx) {
  std::vector<ResourceId> out;
  for (ResourceId c = 0; c < state.resource_count(); ++c) {
    if (hop_admissible(state, flow, rx, c)) out.push_back(c);
  }
  return out;
}

bool node_eligible(const NetworkState& state, FlowId flow, NodeId node) {
  if (admissible_resources(state, flow, node).empty()) return false;
  if (node == state.topology().destination(flow)) return true;
  const auto blocked = blocked_resources(state, flow, node);
  const auto free_count = std::count(blocked.begin(), blocked.end(), 0);
  return free_count >= 2;
}

std::vector<NodeId> eligible_nodes(const NetworkState& state, FlowId flow) {
  std::vector<NodeId> out;
  for (NodeId n = 0; n < state.topology().node_count(); ++n) {
    if (node_eligible(state, flow, n)) out.push_back(n);
  }
  return out;
}

}  // namespace hwnroute
