#include "hwnroute/dqn/trainer.hpp"

#include <array>
#include <fstream>
#include <memory>

#include "hwnroute/baselines.hpp"
#include "hwnroute/binio.hpp"
#include "hwnroute/seed.hpp"

namespace hwnroute::dqn {

namespace {

constexpr std::array<char, 8> kStateMagic{'H', 'W', 'N', 'T', 'R', 'A', 'I', 'N'};
constexpr std::uint32_t kStateVersion = 1;

enum : std::uint64_t { kTopologyStream = 0, kExploreStream = 1, kSampleStream = 2 };

}  // namespace

Trainer::Trainer(TrainerConfig config, QNet net, NetworkFactory factory)
    : config_(std::move(config)),
      net_(std::move(net)),
      factory_(std::move(factory)),
      adam_(net_.parameter_count(), AdamParams{config_.learning_rate}),
      replay_(config_.replay_capacity) {
  if (config_.batch == 0) throw Error("batch size must be positive");
  if (config_.episodes < 0) throw Error("episode count must be non-negative");
}

void Trainer::run(std::int64_t episode_end) {
  const std::int64_t end = std::min(episode_end, config_.episodes);
  while (episode_ < end) run_episode();
}

void Trainer::run_episode() {
  const auto ep = static_cast<std::uint64_t>(episode_);
  NetworkState state = factory_(derive_seed(config_.seed, {kTopologyStream, ep}));
  const int flows = state.flow_count();
  if (flows < 1) throw Error("training needs at least one flow");

  const double eps = epsilon(episode_, config_.episodes);
  auto baseline = make_baseline(Baseline::closest_to_destination);
  DqnPolicy agent(net_, config_.scaling, eps, derive_seed(config_.seed, {kExploreStream, ep}));
  std::vector<Decision> trajectory;
  agent.record_into(&trajectory);

  std::vector<StepPolicy*> table(static_cast<std::size_t>(flows), baseline.get());
  table.back() = &agent;
  establish_all(state, table, config_.route);

  const FlowId learner = flows - 1;
  record_route(replay_, trajectory, state, learner, ep);
  const double reward = state.status(learner) == FlowStatus::complete ? route_rate(state, learner) : 0.0;

  if (replay_.size() >= config_.batch) {
    std::mt19937_64 rng(derive_seed(config_.seed, {kSampleStream, ep}));
    for (int k = 0; k < config_.train_steps_per_episode; ++k) {
      TrainLogRow row;
      row.loss = train_step(net_, adam_, replay_, config_.batch, rng, config_.reward_scale);
      row.step = steps_++;
      row.episode = episode_;
      row.epsilon = eps;
      row.reward_bps = reward;
      log_.push_back(row);
      if (on_log_) on_log_(row);
    }
  }
  ++episode_;
}

void Trainer::save_state(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(kStateMagic.data(), kStateMagic.size());
  binio::put<std::uint32_t>(out, kStateVersion);
  binio::put<std::int64_t>(out, episode_);
  binio::put<std::int64_t>(out, steps_);
  binio::put<std::int64_t>(out, adam_.steps());
  binio::put<std::uint64_t>(out, static_cast<std::uint64_t>(adam_.first_moment().size()));
  binio::put_f64s(out, adam_.first_moment().data(), static_cast<std::size_t>(adam_.first_moment().size()));
  binio::put_f64s(out, adam_.second_moment().data(), static_cast<std::size_t>(adam_.second_moment().size()));
  binio::put<std::uint64_t>(out, replay_.capacity());
  binio::put<std::uint64_t>(out, replay_.head());
  binio::put<std::uint64_t>(out, replay_.size());
  for (const Experience& e : replay_.items()) {
    binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(e.features.size()));
    binio::put_f64s(out, e.features.data(), e.features.size());
    binio::put<std::int32_t>(out, e.action);
    binio::put<std::int32_t>(out, e.resource);
    binio::put<double>(out, e.reward);
    binio::put<std::uint64_t>(out, e.episode);
  }
  if (!out) throw Error("failed writing training state");
}

void Trainer::load_state(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open training state " + path.string());
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kStateMagic) throw Error("not a training state file");
  if (binio::get<std::uint32_t>(in) != kStateVersion) throw Error("unsupported training state version");
  const auto episode = binio::get<std::int64_t>(in);
  const auto steps = binio::get<std::int64_t>(in);
  const auto adam_steps = binio::get<std::int64_t>(in);
  const auto n = binio::get<std::uint64_t>(in);
  if (n != net_.parameter_count()) throw Error("training state does not match the network size");
  binio::get_f64s(in, adam_.first_moment().data(), n);
  binio::get_f64s(in, adam_.second_moment().data(), n);
  const auto capacity = binio::get<std::uint64_t>(in);
  const auto head = binio::get<std::uint64_t>(in);
  const auto count = binio::get<std::uint64_t>(in);
  if (capacity != replay_.capacity()) throw Error("training state replay capacity differs from config");
  if (count > capacity) throw Error("training state replay buffer is malformed");
  std::vector<Experience> items(count);
  for (Experience& e : items) {
    const auto width = binio::get<std::uint32_t>(in);
    if (static_cast<int>(width) != net_.shape().inputs) throw Error("training state experience width mismatch");
    e.features.resize(width);
    binio::get_f64s(in, e.features.data(), width);
    e.action = binio::get<std::int32_t>(in);
    e.resource = binio::get<std::int32_t>(in);
    e.reward = binio::get<double>(in);
    e.episode = binio::get<std::uint64_t>(in);
  }
  replay_.restore(std::move(items), head);
  adam_.set_steps(adam_steps);
  episode_ = episode;
  steps_ = steps;
}

}  // namespace hwnroute::dqn
