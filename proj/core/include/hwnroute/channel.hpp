#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "hwnroute/geometry.hpp"

namespace hwnroute {

class GainGrid;

using ResourceId = int;

/// A radio technology: a center frequency split into equal subbands.
struct Technology {
  double center_freq_hz = 0.0;
  int subbands = 1;
};

/// One (technology, subband) pair. Resources with different ids never
/// interfere with each other.
struct CommResource {
  int tech_index = 0;
  int subband_index = 0;
  double center_freq_hz = 0.0;
  double bandwidth_hz = 0.0;
};

/// Subband bandwidth: 1% of the technology center frequency, split evenly.
double subband_bandwidth(double center_freq_hz, int subbands);

class ResourceSet {
 public:
  ResourceSet() = default;
  explicit ResourceSet(std::vector<Technology> technologies);

  std::span<const CommResource> resources() const { return resources_; }
  const CommResource& operator[](ResourceId id) const { return resources_.at(static_cast<std::size_t>(id)); }
  int size() const { return static_cast<int>(resources_.size()); }
  int tech_count() const { return static_cast<int>(technologies_.size()); }
  const std::vector<Technology>& technologies() const { return technologies_; }
  bool contains(ResourceId id) const { return id >= 0 && id < size(); }

 private:
  std::vector<Technology> technologies_;
  std::vector<CommResource> resources_;
};

enum class PathLossKind { log_distance };

/// Log-distance path loss, PL(d) = PL(1 m) + 10 n log10(d), with optional
/// log-normal shadowing. When `reference_loss_db` is unset the 1 m term is
/// the free-space (Friis) loss at the resource center frequency.
struct PathLossParams {
  PathLossKind kind = PathLossKind::log_distance;
  double exponent = 2.0;
  std::optional<double> reference_loss_db;
  double shadowing_sigma_db = 0.0;
  friend bool operator==(const PathLossParams&, const PathLossParams&) = default;
};

/// Per-technology path loss parameters.
struct ChannelModel {
  std::vector<PathLossParams> per_tech;

  const PathLossParams& for_tech(int tech_index) const;
};

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kReferenceDistance = 1.0;

/// Free-space loss 20 log10(4 pi d f / c) in dB.
double friis_loss_db(double freq_hz, double distance_m = kReferenceDistance);

/// Deterministic path loss (no shadowing) in dB. Distances below the 1 m
/// reference are clamped to it.
double path_loss_db(const PathLossParams& params, double freq_hz, double distance_m);

/// Complex amplitude gain between two positions on `resource`. The
/// shadowing draw and the phase are functions of `seed` only, so callers
/// pass a per-link seed. Throws Error("coincident nodes") when a == b.
std::complex<double> gain(const ChannelModel& model, Vec3 a, Vec3 b,
                          const CommResource& resource, std::uint64_t seed);

/// |gain|^2 without forming the phase.
double power_gain(const ChannelModel& model, Vec3 a, Vec3 b,
                  const CommResource& resource, std::uint64_t seed);

/// Where channel gains come from: an analytic model or a precomputed grid.
class ChannelSource {
 public:
  explicit ChannelSource(ChannelModel model);
  explicit ChannelSource(std::shared_ptr<const GainGrid> grid);

  bool is_grid() const { return grid_ != nullptr; }
  const ChannelModel& model() const { return model_; }
  const GainGrid& grid() const { return *grid_; }

 private:
  ChannelModel model_;
  std::shared_ptr<const GainGrid> grid_;
};

}  // namespace hwnroute
