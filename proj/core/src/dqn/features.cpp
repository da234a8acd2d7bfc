#include "hwnroute/dqn/features.hpp"

#include <cmath>
#include <numbers>

#include "hwnroute/error.hpp"

namespace hwnroute::dqn {

RawFeatures raw_features(const NetworkState& state, FlowId flow, NodeId neighbor, ResourceId c) {
  const Topology& topo = state.topology();
  const NodeId e = state.frontier(flow);
  const Vec3 here = topo.position(e);
  const Vec3 dest = topo.position(topo.destination(flow));
  const Vec3 there = topo.position(neighbor);

  RawFeatures f;
  f.distance_to_destination = distance(there, dest);
  f.angle = angle_at(here, dest, there);
  f.gain_amplitude = std::sqrt(state.power_gain(e, neighbor, c));
  f.interference = interference_at(state, neighbor, c);
  f.rate = link_rate(state, flow, e, neighbor, c);
  return f;
}

StateVector featurize(const NetworkState& state, FlowId flow, const NeighborSet& neighbors, ResourceId c,
                      int slots, const FeatureScaling& scaling) {
  if (neighbors.neighbors.empty()) throw Error("featurize: empty neighbor set");
  StateVector sv;
  sv.resource = c;
  sv.features.assign(static_cast<std::size_t>(slots * kFeaturesPerNeighbor), 0.0);
  sv.valid.assign(static_cast<std::size_t>(slots), 0);
  sv.nodes.assign(static_cast<std::size_t>(slots), -1);

  const double noise = state.radio().noise_power(state.resources()[c]);
  const auto used = std::min<std::size_t>(neighbors.neighbors.size(), static_cast<std::size_t>(slots));
  for (std::size_t i = 0; i < used; ++i) {
    const NodeId n = neighbors.neighbors[i];
    const RawFeatures raw = raw_features(state, flow, n, c);
    double* out = sv.features.data() + i * kFeaturesPerNeighbor;
    out[0] = raw.distance_to_destination / scaling.distance_scale_m;
    out[1] = raw.angle / std::numbers::pi;
    out[2] = (20.0 * std::log10(raw.gain_amplitude) + scaling.gain_offset_db) / scaling.gain_scale_db;
    out[3] = std::log10(1.0 + raw.interference / noise) / scaling.interference_decades;
    out[4] = raw.rate / scaling.rate_scale_bps;
    sv.nodes[i] = n;
    sv.valid[i] = hop_admissible(state, flow, n, c) ? 1 : 0;
  }
  return sv;
}

}  // namespace hwnroute::dqn
