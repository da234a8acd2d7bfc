#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "hwnroute/error.hpp"
#include "hwnroute/netmodel.hpp"
#include "support.hpp"

namespace hwnroute {
namespace {

using testing::make_state;
using testing::random_state;
using testing::total_noise;

// Exponent 2 with a 0 dB reference: |h|^2 = 1 / d^2.
double inv_sq(Vec3 a, Vec3 b) {
  const double d = distance(a, b);
  return 1.0 / (d * d);
}

TEST(Radio, FromDbmConvertsTransmitPowerAndNoiseDensity) {
  const RadioParams p = RadioParams::from_dbm(0.0, -110.0, NoiseMode::density);
  EXPECT_NEAR(p.tx_power_w, 1e-3, 1e-15);
  EXPECT_NEAR(p.noise, 1e-20, 1e-32);
  CommResource r;
  r.bandwidth_hz = 4e6;
  EXPECT_NEAR(p.noise_power(r), 4e-14, 1e-26);

  const RadioParams t = RadioParams::from_dbm(20.0, -100.0, NoiseMode::total);
  EXPECT_NEAR(t.tx_power_w, 0.1, 1e-15);
  EXPECT_NEAR(t.noise_power(r), 1e-13, 1e-25);
}

TEST(Topology, NodeIdLayout) {
  Topology t({{1, 1, 0}, {2, 2, 0}}, {{{3, 3, 0}, {4, 4, 0}}, {{5, 5, 0}, {6, 6, 0}}}, Area{});
  EXPECT_EQ(t.node_count(), 6);
  EXPECT_EQ(t.source(0), 2);
  EXPECT_EQ(t.destination(0), 3);
  EXPECT_EQ(t.source(1), 4);
  EXPECT_EQ(t.destination(1), 5);
  EXPECT_FALSE(t.endpoint_flow(1).has_value());
  EXPECT_EQ(t.endpoint_flow(5).value(), 1);
  EXPECT_TRUE(t.is_relay(0));
  EXPECT_FALSE(t.is_relay(2));
}

TEST(Topology, RejectsNodesOutsideTheArea) {
  EXPECT_THROW(Topology({{2500, 10, 0}}, {}, Area{}), Error);
  Topology t({{10, 10, 0}}, {}, Area{});
  EXPECT_THROW(t.set_position(0, {-1, 0, 0}), Error);
}

TEST(Sinr, SingleLinkNoiseLimited) {
  const Vec3 s{100, 500, 0};
  const Vec3 d{200, 500, 0};
  NetworkState st = make_state({}, {{s, d}}, {{400e6, 1}}, total_noise(1e-9));
  const LinkMeasurement m = sinr(st, 0, 0, 1, 0);
  const double snr = 1.0 * inv_sq(s, d) / 1e-9;
  EXPECT_NEAR(m.sinr / snr, 1.0, 1e-12);
  EXPECT_EQ(m.ifi_power, 0.0);
  EXPECT_EQ(m.ihi_power, 0.0);
  EXPECT_NEAR(m.rate / (4e6 * std::log2(1.0 + snr)), 1.0, 1e-12);
}

TEST(Sinr, InterFlowInterferenceOnSharedResourceOnly) {
  const Vec3 s0{100, 500, 0}, d0{200, 500, 0};
  const Vec3 s1{150, 700, 0}, d1{400, 700, 0};
  NetworkState st = make_state({}, {{s0, d0}, {s1, d1}}, {{400e6, 1}, {800e6, 1}}, total_noise(1e-9));
  st.commit_hop(1, st.topology().destination(1), 0);

  const LinkMeasurement same = sinr(st, 0, 0, 1, 0);
  const double ifi = inv_sq(s1, d0);
  EXPECT_NEAR(same.ifi_power / ifi, 1.0, 1e-12);
  EXPECT_EQ(same.ihi_power, 0.0);
  EXPECT_NEAR(same.sinr / (inv_sq(s0, d0) / (ifi + 1e-9)), 1.0, 1e-12);

  const LinkMeasurement other = sinr(st, 0, 0, 1, 1);
  EXPECT_EQ(other.ifi_power, 0.0);
  EXPECT_NEAR(other.rate / (8e6 * std::log2(1.0 + inv_sq(s0, d0) / 1e-9)), 1.0, 1e-12);
}

TEST(Sinr, IntraFlowInterferenceFromOwnLaterHop) {
  // s -> r0 (c0) -> r1 (c1) -> d (c0): the third hop's transmitter r1
  // interferes with r0's reception on c0.
  const Vec3 r0{300, 500, 0}, r1{500, 500, 0};
  const Vec3 s{100, 500, 0}, d{700, 500, 0};
  NetworkState st = make_state({r0, r1}, {{s, d}}, {{400e6, 1}, {800e6, 1}}, total_noise(1e-9));
  st.set_route(Route{0, {2, 0, 1, 3}, {0, 1, 0}});

  const LinkMeasurement m = sinr(st, 0, 2, 0, 0);
  EXPECT_EQ(m.ifi_power, 0.0);
  EXPECT_NEAR(m.ihi_power / inv_sq(r1, r0), 1.0, 1e-12);
  const LinkMeasurement last = sinr(st, 0, 1, 3, 0);
  EXPECT_NEAR(last.ihi_power / inv_sq(s, d), 1.0, 1e-12);
  const LinkMeasurement mid = sinr(st, 0, 0, 1, 1);
  EXPECT_EQ(mid.ihi_power, 0.0);

  const double rates[] = {4e6 * std::log2(1 + inv_sq(s, r0) / (inv_sq(r1, r0) + 1e-9)),
                          8e6 * std::log2(1 + inv_sq(r0, r1) / 1e-9),
                          4e6 * std::log2(1 + inv_sq(r1, d) / (inv_sq(s, d) + 1e-9))};
  EXPECT_NEAR(route_rate(st, 0) / std::min({rates[0], rates[1], rates[2]}), 1.0, 1e-12);
}

TEST(Sinr, ReceiverTransmittingOnSameResourceGetsZeroRate) {
  const Vec3 r0{300, 500, 0};
  NetworkState st = make_state({r0}, {{{100, 500, 0}, {600, 500, 0}}}, {{400e6, 1}}, total_noise(1e-9));
  st.set_route(Route{0, {1, 0, 2}, {0, 0}});
  const LinkMeasurement m = sinr(st, 0, 1, 0, 0);
  EXPECT_TRUE(std::isinf(m.ihi_power));
  EXPECT_EQ(m.rate, 0.0);
  EXPECT_EQ(route_rate(st, 0), 0.0);
}

TEST(Sinr, RouteOverrideReplacesCommittedHops) {
  const Vec3 r0{300, 500, 0};
  const Vec3 s{100, 500, 0}, d{500, 500, 0};
  NetworkState st = make_state({r0}, {{s, d}}, {{400e6, 1}, {800e6, 1}}, total_noise(1e-9));
  st.set_route(Route{0, {1, 0, 2}, {0, 0}});
  const Route alt{0, {1, 0, 2}, {0, 1}};
  EXPECT_EQ(sinr(st, alt, 1, 0, 0).ihi_power, 0.0);
  EXPECT_GT(route_rate(st, alt), 0.0);
}

TEST(Sinr, RejectsBadLinks) {
  NetworkState st = make_state({}, {{{100, 500, 0}, {200, 500, 0}}}, {{400e6, 1}}, total_noise(1e-9));
  EXPECT_THROW(sinr(st, 0, 0, 0, 0), Error);
  EXPECT_THROW(sinr(st, 0, 0, 7, 0), Error);
  EXPECT_THROW(sinr(st, 0, 0, 1, 3), Error);
}

TEST(Sinr, InterferenceDisabledLeavesNoiseOnly) {
  const Vec3 s0{100, 500, 0}, d0{200, 500, 0};
  NetworkState st = make_state({}, {{s0, d0}, {{150, 700, 0}, {400, 700, 0}}}, {{400e6, 1}}, total_noise(1e-9));
  st.commit_hop(1, 3, 0);
  RadioParams quiet = st.radio();
  quiet.interference = false;
  st.set_radio(quiet);
  EXPECT_EQ(sinr(st, 0, 0, 1, 0).ifi_power, 0.0);
  EXPECT_EQ(interference_at(st, 1, 0), 0.0);
}

TEST(Rates, SumRateAddsBottlenecks) {
  NetworkState st = random_state(11, 6, 3, {400, 800, 2000}, 2);
  st.commit_hop(0, st.topology().destination(0), 0);
  st.commit_hop(1, 2, 2);
  st.commit_hop(1, st.topology().destination(1), 4);
  st.commit_hop(2, st.topology().destination(2), 5);
  ASSERT_TRUE(validate(st).empty());

  double oracle = 0.0;
  for (FlowId f = 0; f < 3; ++f) {
    const Route& r = st.route(f);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r.hops.size(); ++i) {
      b = std::min(b, link_rate(st, f, r.nodes[i], r.nodes[i + 1], r.hops[i]));
    }
    EXPECT_DOUBLE_EQ(route_rate(st, f), b);
    oracle += b;
  }
  EXPECT_NEAR(sum_rate(st), oracle, 1e-9 * oracle);
  EXPECT_NEAR(achieved_sum_rate(st), oracle, 1e-9 * oracle);
}

TEST(Rates, IncompleteAndFailedFlows) {
  NetworkState st = random_state(3, 4, 2, {400, 800});
  st.commit_hop(0, st.topology().destination(0), 0);
  EXPECT_THROW(sum_rate(st), Error);
  EXPECT_THROW(route_rate(st, 1), Error);
  st.mark_failed(1);
  EXPECT_EQ(st.status(1), FlowStatus::failed);
  EXPECT_EQ(flow_rates(st)[1], 0.0);
  EXPECT_NEAR(achieved_sum_rate(st), route_rate(st, 0), 1e-9);
  EXPECT_THROW(st.commit_hop(1, 0, 0), Error);
}

TEST(Rates, InterferenceAtSumsOtherTransmitters) {
  NetworkState st = random_state(5, 5, 2, {400, 800});
  st.commit_hop(0, 1, 0);
  st.commit_hop(1, 3, 0);
  const double expected = st.radio().tx_power_w * (st.power_gain(st.topology().source(0), 4, 0) +
                                                   st.power_gain(st.topology().source(1), 4, 0));
  EXPECT_NEAR(interference_at(st, 4, 0) / expected, 1.0, 1e-12);
  EXPECT_EQ(interference_at(st, 4, 1), 0.0);
  // A transmitter does not interfere with itself.
  EXPECT_NEAR(interference_at(st, st.topology().source(0), 0) /
                  (st.radio().tx_power_w * st.power_gain(st.topology().source(1), st.topology().source(0), 0)),
              1.0, 1e-12);
}

TEST(State, SubbandsShareTheirTechnologyChannel) {
  NetworkState st = random_state(9, 4, 1, {400, 2000}, 3);
  for (NodeId a = 0; a < st.topology().node_count(); ++a) {
    for (NodeId b = 0; b < st.topology().node_count(); ++b) {
      if (a == b) continue;
      EXPECT_EQ(st.power_gain(a, b, 0), st.power_gain(a, b, 2));
      EXPECT_EQ(st.power_gain(a, b, 3), st.power_gain(a, b, 5));
      EXPECT_EQ(st.power_gain(a, b, 1), st.power_gain(b, a, 1));
    }
  }
}

TEST(State, MovingANodeRefreshesGains) {
  NetworkState st = make_state({{300, 500, 0}}, {{{100, 500, 0}, {900, 500, 0}}}, {{400e6, 1}}, total_noise(1e-9));
  EXPECT_NEAR(st.power_gain(1, 0, 0), 1.0 / (200.0 * 200.0), 1e-18);
  st.move_node(0, {100, 600, 0});
  EXPECT_NEAR(st.power_gain(1, 0, 0), 1.0 / (100.0 * 100.0), 1e-18);
  EXPECT_NEAR(st.power_gain(0, 2, 0), inv_sq({100, 600, 0}, {900, 500, 0}), 1e-18);
}

TEST(State, SetRouteAndReset) {
  NetworkState st = random_state(2, 3, 1, {400, 800});
  EXPECT_THROW(st.set_route(Route{0, {0, 3}, {0}}), Error);
  EXPECT_THROW(st.set_route(Route{0, {3, 0}, {}}), Error);
  st.set_route(Route{0, {3, 0}, {1}});
  EXPECT_EQ(st.status(0), FlowStatus::pending);
  EXPECT_EQ(st.frontier(0), 0);
  st.set_route(Route{0, {3, 0, 4}, {1, 0}});
  EXPECT_EQ(st.status(0), FlowStatus::complete);
  st.reset_route(0);
  EXPECT_EQ(st.route(0).nodes, std::vector<NodeId>{3});
  EXPECT_EQ(st.status(0), FlowStatus::pending);
}

bool has(const std::vector<Violation>& v, ViolationKind k) {
  for (const Violation& x : v) {
    if (x.kind == k) return true;
  }
  return false;
}

TEST(Validate, DetectsEachConstraint) {
  NetworkState st = random_state(4, 4, 2, {400, 800, 2000});
  const NodeId s0 = st.topology().source(0), d0 = st.topology().destination(0);
  const NodeId s1 = st.topology().source(1), d1 = st.topology().destination(1);

  st.set_route(Route{0, {s0, 0, 1, d0}, {0, 1, 0}});
  EXPECT_TRUE(validate(st).empty());

  st.set_route(Route{0, {s0, 0, 1, 0, d0}, {0, 1, 2, 0}});
  EXPECT_TRUE(has(validate(st), ViolationKind::cycle));

  st.set_route(Route{0, {s0, 0, d0}, {1, 1}});
  EXPECT_TRUE(has(validate(st), ViolationKind::half_duplex));

  st.set_route(Route{0, {s0, s1, d0}, {0, 1}});
  EXPECT_TRUE(has(validate(st), ViolationKind::foreign_endpoint));

  st.set_route(Route{0, {s0, 0, d0}, {0, 1}});
  st.set_route(Route{1, {s1, 0, d1}, {2, 1}});
  EXPECT_TRUE(has(validate(st), ViolationKind::shared_relay_clash));
  st.set_route(Route{1, {s1, 0, d1}, {2, 0}});
  EXPECT_TRUE(has(validate(st), ViolationKind::shared_relay_clash));
  // Four distinct resources are needed at a shared relay; three suffice
  // only when the second flow reuses none of the first flow's.
  st.set_route(Route{0, {s0, 0, d0}, {0, 1}});
  st.set_route(Route{1, {s1, 0, d1}, {2, 2}});
  const auto v = validate(st);
  EXPECT_FALSE(has(v, ViolationKind::shared_relay_clash));
  EXPECT_TRUE(has(v, ViolationKind::half_duplex));
}

TEST(Admissibility, BlockedResourcesAtSharedRelay) {
  NetworkState st = random_state(4, 4, 2, {400, 800, 2000});
  st.set_route(Route{0, {st.topology().source(0), 0, st.topology().destination(0)}, {0, 2}});
  const auto b = blocked_resources(st, 1, 0);
  EXPECT_EQ(b, (std::vector<char>{1, 0, 1}));
  EXPECT_EQ(blocked_resources(st, 0, 0), (std::vector<char>{0, 0, 0}));
  EXPECT_EQ(admissible_resources(st, 1, 0), std::vector<ResourceId>{1});
  // Relay 0 has one free resource left for flow 1, so it cannot be passed through.
  EXPECT_FALSE(node_eligible(st, 1, 0));
  EXPECT_TRUE(node_eligible(st, 1, 1));
  EXPECT_FALSE(node_eligible(st, 1, st.topology().destination(0)));
  EXPECT_TRUE(node_eligible(st, 1, st.topology().destination(1)));
  EXPECT_FALSE(node_eligible(st, 1, st.topology().source(1)));
}

// Randomized oracle: a hop is admissible exactly when committing it to a
// valid state keeps validate() clean.
TEST(Admissibility, AgreesWithValidateOnRandomStates) {
  std::mt19937_64 rng(77);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    NetworkState st = random_state(100 + static_cast<std::uint64_t>(trial), 6, 3, {400, 800}, 2);
    const int n = st.topology().node_count();
    const int rc = st.resource_count();
    for (int step = 0; step < 12; ++step) {
      const FlowId f = static_cast<FlowId>(rng() % 3);
      if (st.status(f) != FlowStatus::pending) continue;
      std::vector<std::pair<NodeId, ResourceId>> ok;
      for (NodeId rx = 0; rx < n; ++rx) {
        for (ResourceId c = 0; c < rc; ++c) {
          NetworkState probe = st;
          const bool expected = rx != st.frontier(f) && [&] {
            probe.commit_hop(f, rx, c);
            return validate(probe).empty();
          }();
          EXPECT_EQ(hop_admissible(st, f, rx, c), expected) << "trial " << trial << " rx " << rx << " c " << c;
          ++checked;
          if (expected) ok.emplace_back(rx, c);
        }
      }
      if (ok.empty()) break;
      const auto [rx, c] = ok[rng() % ok.size()];
      st.commit_hop(f, rx, c);
      ASSERT_TRUE(validate(st).empty());
    }
  }
  EXPECT_GT(checked, 1000);
}

}  // namespace
}  // namespace hwnroute
