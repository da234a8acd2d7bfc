#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "hwnroute/dqn/agent.hpp"
#include "hwnroute/dqn/checkpoint.hpp"
#include "hwnroute/dqn/trainer.hpp"
#include "hwnroute/error.hpp"
#include "support.hpp"

namespace hwnroute::dqn {
namespace {

using hwnroute::testing::random_state;

QNetShape tiny(int neighbors = 3) {
  QNetShape s = QNetShape::for_neighbors(neighbors);
  s.trunk = {8, 8};
  s.value = {6};
  s.advantage = {7};
  return s;
}

TEST(QNet, DefaultShapeParameterCount) {
  const QNetShape s = QNetShape::for_neighbors(10);
  EXPECT_EQ(s.inputs, 50);
  EXPECT_EQ(s.actions, 10);
  const std::size_t trunk = (50 * 300 + 300) + 2 * (300 * 300 + 300);
  const std::size_t value = (300 * 300 + 300) + (300 * 150 + 150) + (150 + 1);
  const std::size_t adv = (300 * 300 + 300) + (300 * 150 + 150) + (150 * 10 + 10);
  EXPECT_EQ(s.parameter_count(), trunk + value + adv);
  EXPECT_EQ(s.parameter_count(), 468461u);
  const QNet net(s, 1);
  EXPECT_EQ(net.parameter_count(), 468461u);
}

TEST(QNet, DuelingAggregation) {
  const QNet net(tiny(), 3);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n;
  Eigen::MatrixXd x(net.shape().inputs, 5);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = n(rng);
  const QNetOutput out = net.forward_detailed(x);
  for (Eigen::Index b = 0; b < 5; ++b) {
    const double mean_a = out.advantage.col(b).mean();
    for (int a = 0; a < net.shape().actions; ++a) {
      EXPECT_NEAR(out.q(a, b), out.value(b) + out.advantage(a, b) - mean_a, 1e-12);
    }
    EXPECT_NEAR(out.q.col(b).mean(), out.value(b), 1e-12);
  }
  EXPECT_TRUE(net.forward(x).isApprox(out.q));
}

TEST(QNet, DeterministicInitialization) {
  const QNet a(tiny(), 9);
  const QNet b(tiny(), 9);
  const QNet c(tiny(), 10);
  EXPECT_EQ(a.parameters(), b.parameters());
  EXPECT_NE(a.parameters(), c.parameters());
  // Biases start at zero.
  for (const DenseLayout& l : a.layers()) {
    for (int i = 0; i < l.out; ++i) {
      EXPECT_EQ(a.parameters()[static_cast<Eigen::Index>(l.offset + static_cast<std::size_t>(l.in * l.out + i))], 0.0);
    }
  }
}

TEST(QNet, GradientMatchesFiniteDifferences) {
  QNet net(tiny(), 5);
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n;
  // Shift biases off zero so no unit sits exactly at a ReLU kink.
  for (Eigen::Index i = 0; i < net.parameters().size(); ++i) net.parameters()[i] += 0.05 * n(rng);
  Eigen::MatrixXd x(net.shape().inputs, 4);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = n(rng);
  const std::vector<int> actions{0, 2, 1, 2};
  const std::vector<double> targets{0.5, -1.0, 2.0, 0.0};

  Eigen::VectorXd grad;
  const double loss = net.loss_and_gradient(x, actions, targets, grad);
  EXPECT_NEAR(loss, net.loss(x, actions, targets), 1e-12);

  const double h = 1e-6;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < net.parameters().size(); ++i) {
    const double keep = net.parameters()[i];
    net.parameters()[i] = keep + h;
    const double up = net.loss(x, actions, targets);
    net.parameters()[i] = keep - h;
    const double down = net.loss(x, actions, targets);
    net.parameters()[i] = keep;
    const double fd = (up - down) / (2 * h);
    worst = std::max(worst, std::abs(fd - grad[i]) / std::max(1.0, std::abs(fd)));
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(QNet, RejectsBadInputs) {
  const QNet net(tiny(), 1);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(net.shape().inputs + 1, 1);
  EXPECT_THROW(net.forward(x), Error);
  Eigen::MatrixXd ok = Eigen::MatrixXd::Zero(net.shape().inputs, 1);
  Eigen::VectorXd g;
  const std::vector<int> bad{7};
  const std::vector<double> t{0.0};
  EXPECT_THROW(net.loss_and_gradient(ok, bad, t, g), Error);
  QNetShape empty = tiny();
  empty.trunk.clear();
  EXPECT_THROW(QNet(empty, 1), Error);
}

TEST(Adam, FirstStepMovesByLearningRateTimesSign) {
  Adam adam(3, AdamParams{0.01, 0.9, 0.999, 1e-8});
  Eigen::VectorXd p(3), g(3);
  p << 1.0, 2.0, 3.0;
  g << 0.5, -4.0, 0.0;
  adam.step(p, g);
  // Bias-corrected moments after one step are g and g^2.
  EXPECT_NEAR(p[0], 1.0 - 0.01 * 0.5 / (0.5 + 1e-8), 1e-15);
  EXPECT_NEAR(p[1], 2.0 + 0.01 * 4.0 / (4.0 + 1e-8), 1e-15);
  EXPECT_EQ(p[2], 3.0);
  EXPECT_EQ(adam.steps(), 1);
}

TEST(Adam, SecondStepFollowsMomentRecursion) {
  const double lr = 0.1, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  Adam adam(1, AdamParams{lr, b1, b2, eps});
  Eigen::VectorXd p(1), g(1);
  p << 0.0;
  g << 1.0;
  adam.step(p, g);
  const double after1 = p[0];
  g << -3.0;
  adam.step(p, g);
  const double m = b1 * (1 - b1) * 1.0 + (1 - b1) * -3.0;
  const double v = b2 * (1 - b2) * 1.0 + (1 - b2) * 9.0;
  const double mh = m / (1 - b1 * b1);
  const double vh = v / (1 - b2 * b2);
  EXPECT_NEAR(p[0], after1 - lr * mh / (std::sqrt(vh) + eps), 1e-12);
}

TEST(QNet, FitsASimpleRegression) {
  QNet net(tiny(2), 11);
  Adam adam(net.parameter_count(), AdamParams{1e-2});
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1, 1);
  Eigen::MatrixXd x(net.shape().inputs, 64);
  std::vector<int> a(64);
  std::vector<double> t(64);
  for (int b = 0; b < 64; ++b) {
    for (int i = 0; i < net.shape().inputs; ++i) x(i, b) = u(rng);
    a[static_cast<std::size_t>(b)] = b % 2;
    t[static_cast<std::size_t>(b)] = a[static_cast<std::size_t>(b)] == 0 ? x(0, b) : -x(5, b);
  }
  const double before = net.loss(x, a, t);
  Eigen::VectorXd g;
  for (int k = 0; k < 2000; ++k) {
    net.loss_and_gradient(x, a, t, g);
    adam.step(net.parameters(), g);
  }
  EXPECT_LT(net.loss(x, a, t), 0.05 * before);
}

TEST(Exploration, LinearDecay) {
  EXPECT_EQ(epsilon(0, 100), 1.0);
  EXPECT_DOUBLE_EQ(epsilon(25, 100), 0.75);
  EXPECT_EQ(epsilon(100, 100), 0.0);
  EXPECT_EQ(epsilon(150, 100), 0.0);
  EXPECT_EQ(epsilon(5, 0), 0.0);
}

TEST(Replay, RingBufferOverwritesOldest) {
  ReplayBuffer buf(3);
  for (int i = 0; i < 5; ++i) buf.add(Experience{{double(i)}, i, 0, 0.0, std::uint64_t(i)});
  EXPECT_EQ(buf.size(), 3u);
  std::multiset<int> actions;
  for (std::size_t i = 0; i < 3; ++i) actions.insert(buf[i].action);
  EXPECT_EQ(actions, (std::multiset<int>{2, 3, 4}));
  EXPECT_THROW(ReplayBuffer(0), Error);
}

TEST(Replay, SampleIsDistinctAndUniform) {
  ReplayBuffer buf(20);
  for (int i = 0; i < 20; ++i) buf.add(Experience{{}, i, 0, 0.0, 0});
  std::mt19937_64 rng(3);
  std::vector<int> hits(20, 0);
  const int draws = 20000;
  for (int k = 0; k < draws; ++k) {
    const auto idx = buf.sample(5, rng);
    ASSERT_EQ(std::set<std::size_t>(idx.begin(), idx.end()).size(), 5u);
    for (std::size_t i : idx) ++hits[i];
  }
  // Each index appears with probability 1/4 per draw.
  double chi2 = 0.0;
  const double expected = draws * 5.0 / 20.0;
  for (int h : hits) chi2 += (h - expected) * (h - expected) / expected;
  EXPECT_LT(chi2, 43.8);  // 99.9th percentile, 19 dof
  EXPECT_THROW(buf.sample(30, rng), Error);
}

TEST(Features, NormalizationOfRawValues) {
  NetworkState st = random_state(7, 8, 2, {400, 800});
  st.commit_hop(1, 3, 0);
  const NeighborSet ns = select_distance(st, 0, 4);
  const FeatureScaling sc;
  const StateVector sv = featurize(st, 0, ns, 0, 6, sc);
  ASSERT_EQ(sv.features.size(), 30u);
  ASSERT_EQ(sv.slots(), 6);
  const double noise = st.radio().noise_power(st.resources()[0]);
  for (int s = 0; s < 6; ++s) {
    const double* f = &sv.features[static_cast<std::size_t>(s * 5)];
    if (s >= static_cast<int>(ns.neighbors.size())) {
      EXPECT_EQ(sv.nodes[static_cast<std::size_t>(s)], -1);
      EXPECT_EQ(sv.valid[static_cast<std::size_t>(s)], 0);
      for (int k = 0; k < 5; ++k) EXPECT_EQ(f[k], 0.0);
      continue;
    }
    const NodeId n = ns.neighbors[static_cast<std::size_t>(s)];
    EXPECT_EQ(sv.nodes[static_cast<std::size_t>(s)], n);
    EXPECT_EQ(sv.valid[static_cast<std::size_t>(s)] != 0, hop_admissible(st, 0, n, 0));
    const Vec3 e = st.topology().position(st.frontier(0));
    const Vec3 d = st.topology().position(st.topology().destination(0));
    const Vec3 p = st.topology().position(n);
    EXPECT_NEAR(f[0], distance(p, d) / sc.distance_scale_m, 1e-12);
    EXPECT_NEAR(f[1], angle_at(e, d, p) / std::numbers::pi, 1e-12);
    EXPECT_NEAR(f[2], (10 * std::log10(st.power_gain(st.frontier(0), n, 0)) + 100) / 50, 1e-12);
    EXPECT_NEAR(f[3], std::log10(1 + interference_at(st, n, 0) / noise) / 4, 1e-12);
    EXPECT_NEAR(f[4], link_rate(st, 0, st.frontier(0), n, 0) / 1e7, 1e-12);
  }
  EXPECT_THROW(featurize(st, 0, NeighborSet{}, 0, 6, sc), Error);
}

TEST(Agent, ExplorationOnlyPicksAdmissibleActions) {
  NetworkState st = random_state(8, 10, 2, {400, 800, 2000});
  st.commit_hop(1, 2, 0);
  st.commit_hop(1, st.topology().destination(1), 1);
  const QNet net(tiny(6), 1);
  const NeighborSet ns = select_distance(st, 0, 6);
  std::mt19937_64 rng(2);
  std::set<std::pair<NodeId, ResourceId>> seen;
  for (int k = 0; k < 2000; ++k) {
    const Decision d = act(net, st, 0, ns, 1.0, rng, FeatureScaling{});
    ASSERT_TRUE(hop_admissible(st, 0, d.next, d.resource));
    EXPECT_EQ(d.state.resource, d.resource);
    EXPECT_EQ(d.state.nodes[static_cast<std::size_t>(d.slot)], d.next);
    seen.insert({d.next, d.resource});
  }
  std::size_t admissible = 0;
  for (NodeId n : ns.neighbors) admissible += admissible_resources(st, 0, n).size();
  EXPECT_EQ(seen.size(), admissible);
}

TEST(Agent, GreedyTakesArgmaxOverResourcesAndSlots) {
  NetworkState st = random_state(9, 10, 1, {400, 800, 2000});
  const QNet net(tiny(5), 4);
  const NeighborSet ns = select_distance(st, 0, 5);
  std::mt19937_64 rng(1);
  const Decision d = act(net, st, 0, ns, 0.0, rng, FeatureScaling{});
  double best = -1e300;
  for (ResourceId c = 0; c < st.resource_count(); ++c) {
    const StateVector sv = featurize(st, 0, ns, c, 5, FeatureScaling{});
    const Eigen::MatrixXd q = net.forward(Eigen::Map<const Eigen::VectorXd>(sv.features.data(), 25));
    for (int s = 0; s < 5; ++s) {
      if (sv.valid[static_cast<std::size_t>(s)]) best = std::max(best, q(s, 0));
    }
  }
  const StateVector chosen = featurize(st, 0, ns, d.resource, 5, FeatureScaling{});
  const Eigen::MatrixXd q = net.forward(Eigen::Map<const Eigen::VectorXd>(chosen.features.data(), 25));
  EXPECT_EQ(q(d.slot, 0), best);
}

TEST(Agent, RecordRouteUsesFinalBottleneck) {
  NetworkState st = random_state(10, 8, 1, {400, 800});
  const QNet net(tiny(4), 2);
  DqnPolicy policy(net, FeatureScaling{}, 1.0, 3);
  std::vector<Decision> traj;
  policy.record_into(&traj);
  RouteOptions o;
  o.neighbors = 4;
  const BuildResult r = build_route(st, 0, policy, o);
  ReplayBuffer buf(100);
  EXPECT_EQ(record_route(buf, traj, st, 0, 5), traj.size());
  EXPECT_EQ(traj.size(), r.complete ? st.route(0).hop_count() : traj.size());
  const double reward = r.complete ? route_rate(st, 0) : 0.0;
  for (std::size_t i = 0; i < buf.size(); ++i) {
    EXPECT_EQ(buf[i].reward, reward);
    EXPECT_EQ(buf[i].episode, 5u);
  }
  st.mark_failed(0);
  ReplayBuffer failed(100);
  record_route(failed, traj, st, 0, 6);
  for (std::size_t i = 0; i < failed.size(); ++i) EXPECT_EQ(failed[i].reward, 0.0);
}

TEST(Checkpoint, RoundTripIsExact) {
  const QNet net(tiny(), 21);
  std::stringstream buf;
  write_checkpoint(buf, net);
  const QNet back = read_checkpoint(buf);
  EXPECT_EQ(back.shape(), net.shape());
  EXPECT_EQ(back.parameters(), net.parameters());

  const QNet big(QNetShape::for_neighbors(10), 1);
  std::stringstream b2;
  write_checkpoint(b2, big);
  EXPECT_EQ(b2.str().size(), 8u + 4 + 4 + big.layers().size() * 12 + 468461u * 8);
}

TEST(Checkpoint, RejectsCorruptFiles) {
  const QNet net(tiny(), 21);
  std::stringstream buf;
  write_checkpoint(buf, net);
  const std::string bytes = buf.str();

  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  std::stringstream s1(bad_magic);
  EXPECT_THROW(read_checkpoint(s1), Error);

  std::stringstream s2(bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(read_checkpoint(s2), Error);

  std::string bad_version = bytes;
  bad_version[8] = 9;
  std::stringstream s3(bad_version);
  EXPECT_THROW(read_checkpoint(s3), Error);

  EXPECT_THROW(load_checkpoint("/nonexistent/model.qnet"), Error);

  const auto path = std::filesystem::temp_directory_path() / "hwnroute_trailing.qnet";
  {
    std::ofstream out(path, std::ios::binary);
    out << bytes << "x";
  }
  EXPECT_THROW(load_checkpoint(path), Error);
  std::filesystem::remove(path);
}

TrainerConfig small_config(std::int64_t episodes) {
  TrainerConfig c;
  c.episodes = episodes;
  c.batch = 8;
  c.replay_capacity = 50;
  c.learning_rate = 1e-3;
  c.train_steps_per_episode = 2;
  c.seed = 17;
  c.route.neighbors = 4;
  return c;
}

NetworkFactory small_factory() {
  return [](std::uint64_t seed) { return random_state(seed, 8, 2, {400, 800, 2000}); };
}

TEST(Trainer, RunsAndLogs) {
  Trainer t(small_config(12), QNet(tiny(4), 1), small_factory());
  t.run();
  EXPECT_EQ(t.episode(), 12);
  EXPECT_GT(t.steps(), 0);
  EXPECT_EQ(static_cast<std::int64_t>(t.log().size()), t.steps());
  EXPECT_LE(t.replay().size(), 50u);
  for (const TrainLogRow& r : t.log()) {
    EXPECT_GE(r.loss, 0.0);
    EXPECT_GE(r.reward_bps, 0.0);
    EXPECT_DOUBLE_EQ(r.epsilon, epsilon(r.episode, 12));
  }
}

TEST(Trainer, ResumeIsBitIdentical) {
  const auto dir = std::filesystem::temp_directory_path() / "hwnroute_resume_test";
  std::filesystem::create_directories(dir);

  Trainer straight(small_config(10), QNet(tiny(4), 1), small_factory());
  straight.run();

  Trainer first(small_config(10), QNet(tiny(4), 1), small_factory());
  first.run(5);
  save_checkpoint(dir / "half.qnet", first.net());
  first.save_state(dir / "half.train");

  Trainer second(small_config(10), load_checkpoint(dir / "half.qnet"), small_factory());
  second.load_state(dir / "half.train");
  EXPECT_EQ(second.episode(), 5);
  second.run();

  EXPECT_EQ(second.episode(), straight.episode());
  EXPECT_EQ(second.steps(), straight.steps());
  EXPECT_EQ(second.net().parameters(), straight.net().parameters());
  ASSERT_EQ(second.replay().size(), straight.replay().size());
  for (std::size_t i = 0; i < straight.replay().size(); ++i) EXPECT_EQ(second.replay()[i], straight.replay()[i]);
  std::filesystem::remove_all(dir);
}

TEST(Trainer, LoadStateRejectsGarbage) {
  const auto path = std::filesystem::temp_directory_path() / "hwnroute_garbage.train";
  {
    std::ofstream out(path, std::ios::binary);
    out << "not a training state";
  }
  Trainer t(small_config(4), QNet(tiny(4), 1), small_factory());
  EXPECT_THROW(t.load_state(path), Error);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace hwnroute::dqn
