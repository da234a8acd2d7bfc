#pragma once

#include <string>

#include "hwnroute/netmodel.hpp"
#include "hwnroute/selection.hpp"

namespace hwnroute {

/// One routing decision: next node and the resource used to reach it.
struct Hop {
  NodeId next = 0;
  ResourceId resource = 0;
  friend bool operator==(const Hop&, const Hop&) = default;
};

/// Decides the next hop at the frontier of a flow under construction.
/// Implementations throw RoutingError when no admissible hop exists.
class StepPolicy {
 public:
  virtual ~StepPolicy() = default;

  /// `neighbors` is null when uses_neighbor_set() is false.
  virtual Hop next_hop(const NetworkState& state, FlowId flow, const NeighborSet* neighbors) = 0;
  virtual bool uses_neighbor_set() const { return true; }
  virtual std::string name() const = 0;
};

}  // namespace hwnroute
