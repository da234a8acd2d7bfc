#pragma once

#include <vector>

#include "hwnroute/netmodel.hpp"
#include "hwnroute/selection.hpp"

namespace hwnroute::dqn {

inline constexpr int kFeaturesPerNeighbor = 5;

/// Affine maps that bring the raw per-neighbor features to roughly [-1, 1]:
///   distance    d / distance_scale_m
///   angle       theta / pi
///   gain        (20 log10 |h| + gain_offset_db) / gain_scale_db
///   interference log10(1 + I / noise_c) / interference_decades
///   rate        R / rate_scale_bps
struct FeatureScaling {
  double distance_scale_m = 2828.42712474619;
  double gain_offset_db = 100.0;
  double gain_scale_db = 50.0;
  double interference_decades = 4.0;
  double rate_scale_bps = 1e7;

  friend bool operator==(const FeatureScaling&, const FeatureScaling&) = default;
};

/// Unnormalized features of one (neighbor, resource) candidate.
struct RawFeatures {
  double distance_to_destination = 0.0;  // m
  double angle = 0.0;                    // rad, in [0, pi]
  double gain_amplitude = 0.0;           // |h|, frontier -> neighbor
  double interference = 0.0;             // W at the neighbor on the resource
  double rate = 0.0;                     // bit/s, frontier -> neighbor
};

RawFeatures raw_features(const NetworkState& state, FlowId flow, NodeId neighbor, ResourceId c);

/// Fixed-width state for one resource: `slots` groups of five features,
/// zero-padded past the neighbor list. `valid[i]` marks slots whose
/// (neighbor, resource) action is admissible.
struct StateVector {
  std::vector<double> features;
  std::vector<char> valid;
  std::vector<NodeId> nodes;  // node per slot, -1 when padded
  ResourceId resource = 0;

  int slots() const { return static_cast<int>(valid.size()); }
};

/// Neighbors beyond `slots` are dropped.
StateVector featurize(const NetworkState& state, FlowId flow, const NeighborSet& neighbors, ResourceId c,
                      int slots, const FeatureScaling& scaling);

}  // namespace hwnroute::dqn
