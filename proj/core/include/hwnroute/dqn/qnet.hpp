#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace hwnroute::dqn {

/// Layer widths of a dueling Q-network. The trunk is a stack of rectified
/// dense layers; the value and advantage streams each add rectified hidden
/// layers and a linear head (1 output and `actions` outputs respectively).
struct QNetShape {
  int inputs = 50;
  std::vector<int> trunk{300, 300, 300};
  std::vector<int> value{300, 150};
  std::vector<int> advantage{300, 150};
  int actions = 10;

  /// Five features per neighbor in, one Q-value per neighbor out.
  static QNetShape for_neighbors(int neighbors);

  std::size_t parameter_count() const;
  friend bool operator==(const QNetShape&, const QNetShape&) = default;
};

enum class Stream : std::uint32_t { trunk = 0, value = 1, advantage = 2 };

/// Placement of one dense layer inside the flat parameter vector: a
/// column-major `out x in` weight block followed by `out` biases.
struct DenseLayout {
  Stream stream = Stream::trunk;
  int in = 0;
  int out = 0;
  std::size_t offset = 0;
  bool rectified = true;
};

struct QNetOutput {
  Eigen::MatrixXd q;          // actions x batch
  Eigen::RowVectorXd value;   // 1 x batch
  Eigen::MatrixXd advantage;  // actions x batch
};

class QNet {
 public:
  QNet() = default;
  /// He-uniform initialization of rectified layers, Glorot-uniform heads,
  /// zero biases.
  QNet(QNetShape shape, std::uint64_t seed);

  const QNetShape& shape() const { return shape_; }
  std::size_t parameter_count() const { return static_cast<std::size_t>(params_.size()); }
  const std::vector<DenseLayout>& layers() const { return layers_; }

  Eigen::VectorXd& parameters() { return params_; }
  const Eigen::VectorXd& parameters() const { return params_; }

  /// Q = V + A - mean_a(A), columns of `x` are samples.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;
  QNetOutput forward_detailed(const Eigen::MatrixXd& x) const;

  /// Mean over the batch of (Q(x_b)[a_b] - t_b)^2; writes d(loss)/d(params)
  /// into `grad`. Only the taken action's output carries error.
  double loss_and_gradient(const Eigen::MatrixXd& x, std::span<const int> actions,
                           std::span<const double> targets, Eigen::VectorXd& grad) const;

  double loss(const Eigen::MatrixXd& x, std::span<const int> actions, std::span<const double> targets) const;

 private:
  void build_layout();

  QNetShape shape_;
  std::vector<DenseLayout> layers_;
  Eigen::VectorXd params_;
};

struct AdamParams {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  Adam() = default;
  Adam(std::size_t parameters, AdamParams params);

  void step(Eigen::VectorXd& parameters, const Eigen::VectorXd& grad);

  const AdamParams& params() const { return params_; }
  void set_learning_rate(double lr) { params_.learning_rate = lr; }
  std::int64_t steps() const { return t_; }

  // Exposed for training-state persistence.
  Eigen::VectorXd& first_moment() { return m_; }
  Eigen::VectorXd& second_moment() { return v_; }
  const Eigen::VectorXd& first_moment() const { return m_; }
  const Eigen::VectorXd& second_moment() const { return v_; }
  void set_steps(std::int64_t t) { t_ = t; }

 private:
  AdamParams params_;
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
  std::int64_t t_ = 0;
};

}  // namespace hwnroute::dqn
