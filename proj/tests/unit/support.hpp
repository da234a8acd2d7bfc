#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "hwnroute/gain_grid.hpp"
#include "hwnroute/netmodel.hpp"

namespace hwnroute::testing {

/// Pure inverse-power model: exponent 2, 0 dB at 1 m, no shadowing.
inline ChannelModel unit_model(int techs, double exponent = 2.0) {
  ChannelModel m;
  for (int i = 0; i < techs; ++i) {
    PathLossParams p;
    p.exponent = exponent;
    p.reference_loss_db = 0.0;
    m.per_tech.push_back(p);
  }
  return m;
}

/// Noise in total mode so the noise power does not depend on bandwidth.
inline RadioParams total_noise(double noise_w, double tx_w = 1.0) {
  RadioParams r;
  r.tx_power_w = tx_w;
  r.noise = noise_w;
  r.noise_mode = NoiseMode::total;
  return r;
}

inline NetworkState make_state(std::vector<Vec3> relays, std::vector<FlowEndpoints> flows, std::vector<Technology> techs,
                               RadioParams radio, double exponent = 2.0, Area area = {2000.0, 2000.0}) {
  const int n = static_cast<int>(techs.size());
  return NetworkState(Topology(std::move(relays), std::move(flows), area, 7), ResourceSet(std::move(techs)), radio,
                      ChannelSource(unit_model(n, exponent)));
}

/// Network whose gains come from an explicit grid; positions are only used
/// by geometric rules.
inline NetworkState make_grid_state(std::vector<Vec3> relays, std::vector<FlowEndpoints> flows,
                                    std::vector<Technology> techs, RadioParams radio, const GainGrid& grid) {
  return NetworkState(Topology(std::move(relays), std::move(flows), Area{2000.0, 2000.0}, 7),
                      ResourceSet(std::move(techs)), radio, ChannelSource(std::make_shared<const GainGrid>(grid)));
}

inline Vec3 random_point(std::mt19937_64& rng, double w = 2000.0, double h = 2000.0) {
  std::uniform_real_distribution<double> ux(0.0, w), uy(0.0, h);
  const double x = ux(rng);
  const double y = uy(rng);
  return {x, y, 0.0};
}

/// Random network: `relays` relays, `flows` flows, one technology per entry
/// of `freqs_mhz` with `subbands` each, log-distance exponent 3.
inline NetworkState random_state(std::uint64_t seed, int relays, int flows, std::vector<double> freqs_mhz,
                                 int subbands = 1, double noise_dbm = -110.0) {
  std::mt19937_64 rng(seed);
  std::vector<Vec3> r;
  for (int i = 0; i < relays; ++i) r.push_back(random_point(rng));
  std::vector<FlowEndpoints> f;
  for (int i = 0; i < flows; ++i) {
    const Vec3 s = random_point(rng);
    const Vec3 d = random_point(rng);
    f.push_back({s, d});
  }
  std::vector<Technology> techs;
  ChannelModel m;
  for (double mhz : freqs_mhz) {
    techs.push_back({mhz * 1e6, subbands});
    PathLossParams p;
    p.exponent = 3.0;
    m.per_tech.push_back(p);
  }
  return NetworkState(Topology(std::move(r), std::move(f), Area{2000.0, 2000.0}, seed), ResourceSet(std::move(techs)),
                      RadioParams::from_dbm(0.0, noise_dbm, NoiseMode::density), ChannelSource(std::move(m)));
}

}  // namespace hwnroute::testing
