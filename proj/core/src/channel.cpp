#include "hwnroute/channel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "hwnroute/error.hpp"
#include "hwnroute/gain_grid.hpp"
#include "hwnroute/seed.hpp"

namespace hwnroute {

namespace {

double unit_uniform(std::uint64_t bits) {
  // 53 random mantissa bits in (0, 1).
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double shadowing_db(const PathLossParams& params, std::uint64_t seed) {
  if (params.shadowing_sigma_db <= 0.0) return 0.0;
  const double u1 = unit_uniform(mix64(seed ^ 0x5bd1e995ULL));
  const double u2 = unit_uniform(mix64(seed ^ 0x1b873593ULL));
  const double normal = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  return params.shadowing_sigma_db * normal;
}

}  // namespace

double subband_bandwidth(double center_freq_hz, int subbands) {
  return 0.01 * center_freq_hz / subbands;
}

ResourceSet::ResourceSet(std::vector<Technology> technologies)
    : technologies_(std::move(technologies)) {
  for (std::size_t m = 0; m < technologies_.size(); ++m) {
    const Technology& tech = technologies_[m];
    if (!(tech.center_freq_hz > 0.0)) {
      throw Error("technology " + std::to_string(m) + ": center frequency must be positive");
    }
    if (tech.subbands < 1) {
      throw Error("technology " + std::to_string(m) + ": subband count must be >= 1");
    }
    const double bandwidth = subband_bandwidth(tech.center_freq_hz, tech.subbands);
    for (int j = 0; j < tech.subbands; ++j) {
      resources_.push_back({static_cast<int>(m), j, tech.center_freq_hz, bandwidth});
    }
  }
}

const PathLossParams& ChannelModel::for_tech(int tech_index) const {
  if (tech_index < 0 || static_cast<std::size_t>(tech_index) >= per_tech.size()) {
    throw Error("channel model has no parameters for technology " + std::to_string(tech_index));
  }
  return per_tech[static_cast<std::size_t>(tech_index)];
}

double friis_loss_db(double freq_hz, double distance_m) {
  return 20.0 * std::log10(4.0 * std::numbers::pi * distance_m * freq_hz / kSpeedOfLight);
}

double path_loss_db(const PathLossParams& params, double freq_hz, double distance_m) {
  const double d = std::max(distance_m, kReferenceDistance);
  const double reference = params.reference_loss_db ? *params.reference_loss_db
                                                    : friis_loss_db(freq_hz, kReferenceDistance);
  return reference + 10.0 * params.exponent * std::log10(d / kReferenceDistance);
}

double power_gain(const ChannelModel& model, Vec3 a, Vec3 b, const CommResource& resource,
                  std::uint64_t seed) {
  const double d = distance(a, b);
  if (d == 0.0) throw Error("coincident nodes");
  const PathLossParams& params = model.for_tech(resource.tech_index);
  const double loss = path_loss_db(params, resource.center_freq_hz, d) + shadowing_db(params, seed);
  return std::pow(10.0, -loss / 10.0);
}

std::complex<double> gain(const ChannelModel& model, Vec3 a, Vec3 b, const CommResource& resource,
                          std::uint64_t seed) {
  const double magnitude = std::sqrt(power_gain(model, a, b, resource, seed));
  const double phase = 2.0 * std::numbers::pi * unit_uniform(mix64(seed ^ 0xc2b2ae35ULL));
  return std::polar(magnitude, phase);
}

ChannelSource::ChannelSource(ChannelModel model) : model_(std::move(model)) {}

ChannelSource::ChannelSource(std::shared_ptr<const GainGrid> grid) : grid_(std::move(grid)) {
  if (!grid_) throw Error("null gain grid");
}

}  // namespace hwnroute
