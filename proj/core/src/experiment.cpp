#include "hwnroute/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>

#include "hwnroute/csv.hpp"
#include "hwnroute/dqn/checkpoint.hpp"
#include "hwnroute/error.hpp"
#include "hwnroute/seed.hpp"

namespace hwnroute {

std::unique_ptr<StepPolicy> make_scheme_policy(const std::string& scheme, const dqn::QNet* net,
                                               const dqn::FeatureScaling& scaling) {
  if (scheme == "dqn") {
    if (!net) throw Error("scheme dqn needs a trained checkpoint (--checkpoint)");
    return std::make_unique<dqn::DqnPolicy>(*net, scaling, 0.0, 0);
  }
  const auto b = parse_baseline(scheme);
  if (!b) throw Error("unknown scheme " + scheme);
  return make_baseline(*b);
}

double run_scheme(NetworkState& state, const std::string& scheme, const dqn::QNet* net, const ScenarioConfig& config) {
  auto policy = make_scheme_policy(scheme, net, config.features);
  std::vector<StepPolicy*> table(static_cast<std::size_t>(state.flow_count()), policy.get());
  const RouteOptions opts = make_route_options(config);
  establish_all(state, table, opts);
  reestablish(state, table, opts, config.reestablish_rounds);
  return achieved_sum_rate(state);
}

std::uint64_t eval_topology_seed(const ScenarioConfig& config, int k) {
  return derive_seed(config.eval.seed, {static_cast<std::uint64_t>(k)});
}

int EvalResult::scheme_index(const std::string& name) const {
  for (std::size_t i = 0; i < schemes.size(); ++i) {
    if (schemes[i] == name) return static_cast<int>(i);
  }
  throw Error("scheme " + name + " was not evaluated");
}

double EvalResult::mean(int scheme) const {
  const auto& r = rates.at(static_cast<std::size_t>(scheme));
  return r.empty() ? 0.0 : std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
}

double EvalResult::stderr_of_mean(int scheme) const {
  const auto& r = rates.at(static_cast<std::size_t>(scheme));
  if (r.size() < 2) return 0.0;
  const double m = mean(scheme);
  double ss = 0.0;
  for (double v : r) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(r.size() - 1) / static_cast<double>(r.size()));
}

namespace {

// Runs job(k) for k in [0, n) on up to `threads` workers; rethrows the first
// failure after all workers stop.
template <typename Job>
void parallel_for(int n, int threads, Job&& job) {
  const int workers = std::max(1, std::min(threads, n));
  if (workers == 1) {
    for (int k = 0; k < n; ++k) job(k);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int k = next++; k < n; k = next++) {
        try {
          job(k);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

EvalResult evaluate(const ScenarioConfig& config, const std::vector<std::string>& schemes, const dqn::QNet* net,
                    int topologies, int threads) {
  if (topologies < 1) throw Error("need at least one topology");
  const NetworkBuilder build(config);
  for (const std::string& s : schemes) make_scheme_policy(s, net, config.features);

  EvalResult res;
  res.schemes = schemes;
  res.seeds.resize(static_cast<std::size_t>(topologies));
  res.rates.assign(schemes.size(), std::vector<double>(static_cast<std::size_t>(topologies), 0.0));
  parallel_for(topologies, threads, [&](int k) {
    const std::uint64_t seed = eval_topology_seed(config, k);
    res.seeds[static_cast<std::size_t>(k)] = seed;
    const NetworkState fresh = build(seed);
    for (std::size_t s = 0; s < schemes.size(); ++s) {
      NetworkState state = fresh;
      res.rates[s][static_cast<std::size_t>(k)] = run_scheme(state, schemes[s], net, config);
    }
  });
  return res;
}

ScenarioConfig sweep_point(const ScenarioConfig& base, SweepAxis axis, int value) {
  ScenarioConfig c = base;
  switch (axis) {
    case SweepAxis::subbands:
      for (TechnologyConfig& t : c.technologies) t.subbands = value;
      break;
    case SweepAxis::relay_count:
      c.relays = value;
      c.mobility.mobile_relays = std::min(c.mobility.mobile_relays, value);
      break;
    case SweepAxis::resource_count:
      if (value < 1 || value > static_cast<int>(base.technologies.size())) {
        throw Error("resource_count sweep values must lie in [1, number of technologies]");
      }
      c.technologies.resize(static_cast<std::size_t>(value));
      break;
    case SweepAxis::flow_count:
      c.flows = value;
      break;
  }
  validate(c);
  return c;
}

std::vector<double> MobilityResult::mean_series(int scheme) const {
  const auto& runs = series.at(static_cast<std::size_t>(scheme));
  if (runs.empty()) return {};
  std::vector<double> mean(runs.front().size(), 0.0);
  for (const auto& r : runs) {
    for (std::size_t t = 0; t < mean.size(); ++t) mean[t] += r[t];
  }
  for (double& m : mean) m /= static_cast<double>(runs.size());
  return mean;
}

MobilityResult evaluate_mobility(const ScenarioConfig& config, const std::vector<std::string>& schemes,
                                 const dqn::QNet* net, int topologies, int threads) {
  if (config.gain_grid) throw Error("mobility needs the path-loss channel model, not a gain grid");
  if (topologies < 1) throw Error("need at least one topology");
  const NetworkBuilder build(config);
  for (const std::string& s : schemes) make_scheme_policy(s, net, config.features);

  const MobilitySchedule schedule{config.mobility.horizon_s, config.mobility.decision_interval_s,
                                  config.reestablish_rounds};
  const RouteOptions opts = make_route_options(config);
  MobilityResult res;
  res.schemes = schemes;
  res.series.assign(schemes.size(), std::vector<std::vector<double>>(static_cast<std::size_t>(topologies)));
  parallel_for(topologies, threads, [&](int k) {
    const std::uint64_t seed = eval_topology_seed(config, k);
    const NetworkState fresh = build(seed);
    for (std::size_t s = 0; s < schemes.size(); ++s) {
      auto policy = make_scheme_policy(schemes[s], net, config.features);
      std::vector<StepPolicy*> table(static_cast<std::size_t>(fresh.flow_count()), policy.get());
      // Same trajectories for every scheme.
      MobilityState ms = make_mobility(fresh.topology(), config.mobility.model, config.mobility.mobile_relays,
                                       config.mobility.max_speed_mps, derive_seed(seed, {0x6d6f6265ULL}));
      res.series[s][static_cast<std::size_t>(k)] = run_mobility_experiment(fresh, table, opts, std::move(ms), schedule);
    }
  });
  return res;
}

std::unique_ptr<dqn::Trainer> make_trainer(const ScenarioConfig& config) {
  const NetworkBuilder build(config);
  dqn::QNet net(make_qnet_shape(config), derive_seed(config.training.seed, {0x696e6974ULL}));
  return std::make_unique<dqn::Trainer>(make_trainer_config(config), std::move(net),
                                        [build](std::uint64_t seed) { return build(seed); });
}

std::filesystem::path default_out_dir() {
  if (const char* env = std::getenv("HWNROUTE_OUT_DIR"); env && *env) return env;
  return "results";
}

namespace {

std::filesystem::path prepare_out(const RunOptions& o) {
  std::filesystem::create_directories(o.out_dir);
  return o.out_dir;
}

std::optional<dqn::QNet> maybe_load(const RunOptions& o, const std::vector<std::string>& schemes) {
  const bool needs = std::find(schemes.begin(), schemes.end(), "dqn") != schemes.end();
  if (!needs) return std::nullopt;
  if (!o.checkpoint) throw Error("scheme dqn needs --checkpoint");
  return dqn::load_checkpoint(*o.checkpoint);
}

void check_net(const ScenarioConfig& config, const std::optional<dqn::QNet>& net) {
  if (net && net->shape().actions != config.neighbors) {
    throw Error("checkpoint scores " + std::to_string(net->shape().actions) + " neighbors but the config uses " +
                std::to_string(config.neighbors));
  }
}

std::filesystem::path state_path(const std::filesystem::path& checkpoint) {
  return checkpoint.string() + ".train";
}

}  // namespace

int cmd_train(const ScenarioConfig& base, const RunOptions& o) {
  ScenarioConfig config = base;
  if (o.seeds) config.training.episodes = *o.seeds;
  validate(config);
  const auto out = prepare_out(o);
  const auto ckpt = o.checkpoint.value_or(out / "model.qnet");

  auto trainer = make_trainer(config);
  bool resumed = false;
  if (o.resume && std::filesystem::exists(ckpt) && std::filesystem::exists(state_path(ckpt))) {
    const NetworkBuilder build(config);
    trainer = std::make_unique<dqn::Trainer>(make_trainer_config(config), dqn::load_checkpoint(ckpt),
                                             [build](std::uint64_t seed) { return build(seed); });
    trainer->load_state(state_path(ckpt));
    resumed = true;
  }
  csv::Writer log(out / "train_log.csv", {"step", "episode", "epsilon", "loss", "reward_bps"}, resumed);
  trainer->set_log_callback([&](const dqn::TrainLogRow& r) {
    log.row({std::to_string(r.step), std::to_string(r.episode), csv::format(r.epsilon), csv::format(r.loss),
             csv::format(r.reward_bps)});
  });
  const std::int64_t report = std::max<std::int64_t>(1, config.training.episodes / 20);
  while (trainer->episode() < config.training.episodes) {
    trainer->run_episode();
    if (o.log && trainer->episode() % report == 0) {
      *o.log << "episode " << trainer->episode() << "/" << config.training.episodes << "\n" << std::flush;
    }
  }
  log.flush();
  dqn::save_checkpoint(ckpt, trainer->net());
  trainer->save_state(state_path(ckpt));
  if (o.log) *o.log << "wrote " << ckpt.string() << "\n";
  return 0;
}

namespace {

void write_eval(const std::filesystem::path& out, const EvalResult& res) {
  csv::Writer rows(out / "eval.csv", {"topology_seed", "scheme", "sum_rate_bps"});
  for (std::size_t k = 0; k < res.seeds.size(); ++k) {
    for (std::size_t s = 0; s < res.schemes.size(); ++s) {
      rows.row({std::to_string(res.seeds[k]), res.schemes[s], csv::format(res.rates[s][k])});
    }
  }
  csv::Writer summary(out / "summary.csv", {"scheme", "mean_sum_rate_bps", "stderr_bps", "topologies"});
  for (std::size_t s = 0; s < res.schemes.size(); ++s) {
    const int i = static_cast<int>(s);
    summary.row({res.schemes[s], csv::format(res.mean(i)), csv::format(res.stderr_of_mean(i)),
                 std::to_string(res.seeds.size())});
    std::vector<double> sorted = res.rates[s];
    std::sort(sorted.begin(), sorted.end());
    csv::Writer cdf(out / ("cdf_" + res.schemes[s] + ".csv"), {"sum_rate_bps", "cdf"});
    for (std::size_t k = 0; k < sorted.size(); ++k) {
      cdf.row({csv::format(sorted[k]), csv::format(static_cast<double>(k + 1) / static_cast<double>(sorted.size()))});
    }
  }
}

}  // namespace

int cmd_eval(const ScenarioConfig& config, const RunOptions& o) {
  const auto out = prepare_out(o);
  const auto net = maybe_load(o, config.eval.schemes);
  check_net(config, net);
  const int n = o.seeds.value_or(config.eval.topologies);
  const EvalResult res = evaluate(config, config.eval.schemes, net ? &*net : nullptr, n, o.threads);
  write_eval(out, res);
  if (o.log) {
    for (std::size_t s = 0; s < res.schemes.size(); ++s) {
      *o.log << res.schemes[s] << " mean " << res.mean(static_cast<int>(s)) / 1e6 << " Mbit/s\n";
    }
  }
  return 0;
}

int cmd_sweep(const ScenarioConfig& config, const RunOptions& o) {
  const auto out = prepare_out(o);
  const auto net = maybe_load(o, config.eval.schemes);
  check_net(config, net);
  const int n = o.seeds.value_or(config.eval.topologies);
  csv::Writer rows(out / "sweep.csv", {"axis", "value", "scheme", "mean_sum_rate_bps", "stderr_bps"});
  for (int v : config.sweep.values) {
    const ScenarioConfig point = sweep_point(config, config.sweep.axis, v);
    const EvalResult res = evaluate(point, point.eval.schemes, net ? &*net : nullptr, n, o.threads);
    for (std::size_t s = 0; s < res.schemes.size(); ++s) {
      const int i = static_cast<int>(s);
      rows.row({std::string(to_string(config.sweep.axis)), std::to_string(v), res.schemes[s],
                csv::format(res.mean(i)), csv::format(res.stderr_of_mean(i))});
    }
    if (o.log) *o.log << to_string(config.sweep.axis) << "=" << v << " done\n" << std::flush;
  }
  return 0;
}

int cmd_mobility(const ScenarioConfig& config, const RunOptions& o) {
  const auto out = prepare_out(o);
  const auto net = maybe_load(o, config.eval.schemes);
  check_net(config, net);
  const int n = o.seeds.value_or(config.eval.topologies);
  const MobilityResult res = evaluate_mobility(config, config.eval.schemes, net ? &*net : nullptr, n, o.threads);
  csv::Writer rows(out / "mobility.csv", {"t_s", "scheme", "mean_sum_rate_bps", "stderr_bps"});
  for (std::size_t s = 0; s < res.schemes.size(); ++s) {
    const auto& runs = res.series[s];
    const auto mean = res.mean_series(static_cast<int>(s));
    for (std::size_t t = 0; t < mean.size(); ++t) {
      double ss = 0.0;
      for (const auto& r : runs) ss += (r[t] - mean[t]) * (r[t] - mean[t]);
      const double se =
          runs.size() < 2 ? 0.0 : std::sqrt(ss / static_cast<double>(runs.size() - 1) / static_cast<double>(runs.size()));
      rows.row({std::to_string(t), res.schemes[s], csv::format(mean[t]), csv::format(se)});
    }
  }
  return 0;
}

}  // namespace hwnroute
