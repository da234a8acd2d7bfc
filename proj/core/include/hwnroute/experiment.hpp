#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hwnroute/scenario.hpp"

namespace hwnroute {

/// Policy for a scheme name: "dqn" (needs `net`) or a baseline name.
std::unique_ptr<StepPolicy> make_scheme_policy(const std::string& scheme, const dqn::QNet* net,
                                               const dqn::FeatureScaling& scaling);

/// Routes every flow of `state` with `scheme`, then runs the configured
/// re-establishment rounds. Returns the achieved sum rate.
double run_scheme(NetworkState& state, const std::string& scheme, const dqn::QNet* net, const ScenarioConfig& config);

/// Held-out topology seed k of an evaluation.
std::uint64_t eval_topology_seed(const ScenarioConfig& config, int k);

struct EvalResult {
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> schemes;
  std::vector<std::vector<double>> rates;  // [scheme][topology], bit/s

  int scheme_index(const std::string& name) const;
  double mean(int scheme) const;
  double stderr_of_mean(int scheme) const;
};

/// Runs each scheme on the same topologies, split over `threads` workers.
/// Results are indexed by topology, so thread count never changes them.
EvalResult evaluate(const ScenarioConfig& config, const std::vector<std::string>& schemes, const dqn::QNet* net,
                    int topologies, int threads);

/// Config for one value of a sweep axis.
ScenarioConfig sweep_point(const ScenarioConfig& base, SweepAxis axis, int value);

struct MobilityResult {
  std::vector<std::string> schemes;
  std::vector<std::vector<std::vector<double>>> series;  // [scheme][topology][second]

  std::vector<double> mean_series(int scheme) const;
};

MobilityResult evaluate_mobility(const ScenarioConfig& config, const std::vector<std::string>& schemes,
                                 const dqn::QNet* net, int topologies, int threads);

/// Trainer over the scenario's random topologies with a freshly
/// initialized network seeded from training.seed.
std::unique_ptr<dqn::Trainer> make_trainer(const ScenarioConfig& config);

struct RunOptions {
  std::filesystem::path out_dir = ".";
  std::optional<std::filesystem::path> checkpoint;
  /// Number of topology seeds: training episodes for train, held-out
  /// topologies otherwise.
  std::optional<int> seeds;
  int threads = 1;
  bool resume = false;
  std::ostream* log = nullptr;
};

/// Directory used when --out is not given: $HWNROUTE_OUT_DIR, else "results".
std::filesystem::path default_out_dir();

int cmd_train(const ScenarioConfig& config, const RunOptions& options);
int cmd_eval(const ScenarioConfig& config, const RunOptions& options);
int cmd_sweep(const ScenarioConfig& config, const RunOptions& options);
int cmd_mobility(const ScenarioConfig& config, const RunOptions& options);

}  // namespace hwnroute
