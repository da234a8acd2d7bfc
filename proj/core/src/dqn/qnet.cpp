#include "hwnroute/dqn/qnet.hpp"

#include <cmath>
#include <random>

#include "hwnroute/error.hpp"

namespace hwnroute::dqn {

using Eigen::MatrixXd;
using Eigen::VectorXd;

QNetShape QNetShape::for_neighbors(int neighbors) {
  QNetShape s;
  s.inputs = 5 * neighbors;
  s.actions = neighbors;
  return s;
}

std::size_t QNetShape::parameter_count() const {
  auto dense = [](int in, int out) { return static_cast<std::size_t>(in) * static_cast<std::size_t>(out) + static_cast<std::size_t>(out); };
  std::size_t total = 0;
  int width = inputs;
  for (int w : trunk) {
    total += dense(width, w);
    width = w;
  }
  const int trunk_out = width;
  width = trunk_out;
  for (int w : value) {
    total += dense(width, w);
    width = w;
  }
  total += dense(width, 1);
  width = trunk_out;
  for (int w : advantage) {
    total += dense(width, w);
    width = w;
  }
  total += dense(width, actions);
  return total;
}

namespace {

struct Tape {
  std::vector<MatrixXd> input;  // activation fed into each layer
  std::vector<MatrixXd> pre;    // pre-activation of each layer
};

Eigen::Map<const MatrixXd> weights(const VectorXd& p, const DenseLayout& l) {
  return {p.data() + l.offset, l.out, l.in};
}
Eigen::Map<const VectorXd> bias(const VectorXd& p, const DenseLayout& l) {
  return {p.data() + l.offset + static_cast<std::size_t>(l.out) * static_cast<std::size_t>(l.in), l.out};
}
Eigen::Map<MatrixXd> weights(VectorXd& p, const DenseLayout& l) { return {p.data() + l.offset, l.out, l.in}; }
Eigen::Map<VectorXd> bias(VectorXd& p, const DenseLayout& l) {
  return {p.data() + l.offset + static_cast<std::size_t>(l.out) * static_cast<std::size_t>(l.in), l.out};
}

}  // namespace

QNet::QNet(QNetShape shape, std::uint64_t seed) : shape_(std::move(shape)) {
  if (shape_.inputs < 1 || shape_.actions < 1 || shape_.trunk.empty()) throw Error("invalid Q-network shape");
  build_layout();
  params_ = VectorXd::Zero(static_cast<Eigen::Index>(shape_.parameter_count()));
  std::mt19937_64 rng(seed);
  for (const DenseLayout& l : layers_) {
    const double limit = l.rectified ? std::sqrt(6.0 / l.in) : std::sqrt(6.0 / (l.in + l.out));
    std::uniform_real_distribution<double> u(-limit, limit);
    auto w = weights(params_, l);
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = u(rng);
    }
  }
}

void QNet::build_layout() {
  layers_.clear();
  std::size_t offset = 0;
  auto add = [&](Stream s, int in, int out, bool rectified) {
    layers_.push_back({s, in, out, offset, rectified});
    offset += static_cast<std::size_t>(in) * static_cast<std::size_t>(out) + static_cast<std::size_t>(out);
  };
  int width = shape_.inputs;
  for (int w : shape_.trunk) {
    add(Stream::trunk, width, w, true);
    width = w;
  }
  const int trunk_out = width;
  width = trunk_out;
  for (int w : shape_.value) {
    add(Stream::value, width, w, true);
    width = w;
  }
  add(Stream::value, width, 1, false);
  width = trunk_out;
  for (int w : shape_.advantage) {
    add(Stream::advantage, width, w, true);
    width = w;
  }
  add(Stream::advantage, width, shape_.actions, false);
}

namespace {

MatrixXd run_layers(const VectorXd& p, const std::vector<DenseLayout>& layers, std::size_t first, std::size_t last,
                    const MatrixXd& x, Tape* tape) {
  MatrixXd a = x;
  for (std::size_t k = first; k < last; ++k) {
    const DenseLayout& l = layers[k];
    MatrixXd z = weights(p, l) * a;
    z.colwise() += bias(p, l);
    if (tape) {
      tape->input[k] = std::move(a);
      tape->pre[k] = z;
    }
    a = l.rectified ? MatrixXd(z.cwiseMax(0.0)) : std::move(z);
  }
  return a;
}

struct Ranges {
  std::size_t trunk_end;
  std::size_t value_end;
  std::size_t adv_end;
};

Ranges ranges(const QNetShape& s, const std::vector<DenseLayout>& layers) {
  const std::size_t t = s.trunk.size();
  const std::size_t v = t + s.value.size() + 1;
  return {t, v, layers.size()};
}

QNetOutput run(const VectorXd& p, const QNetShape& s, const std::vector<DenseLayout>& layers, const MatrixXd& x,
               Tape* tape) {
  if (x.rows() != s.inputs) throw Error("Q-network input width mismatch");
  const Ranges r = ranges(s, layers);
  const MatrixXd h = run_layers(p, layers, 0, r.trunk_end, x, tape);
  QNetOutput out;
  out.value = run_layers(p, layers, r.trunk_end, r.value_end, h, tape);
  out.advantage = run_layers(p, layers, r.value_end, r.adv_end, h, tape);
  const Eigen::RowVectorXd mean = out.advantage.colwise().mean();
  out.q = out.advantage;
  out.q.rowwise() += out.value - mean;
  return out;
}

// Backpropagates `grad_out` through layers [first, last) in reverse and
// returns the gradient with respect to the input of layer `first`.
MatrixXd backprop(const VectorXd& p, const std::vector<DenseLayout>& layers, std::size_t first, std::size_t last,
                  const Tape& tape, MatrixXd grad_out, VectorXd& grad) {
  MatrixXd g = std::move(grad_out);
  for (std::size_t k = last; k-- > first;) {
    const DenseLayout& l = layers[k];
    if (l.rectified) g = g.cwiseProduct((tape.pre[k].array() > 0.0).cast<double>().matrix());
    weights(grad, l).noalias() += g * tape.input[k].transpose();
    bias(grad, l) += g.rowwise().sum();
    g = weights(p, l).transpose() * g;
  }
  return g;
}

}  // namespace

MatrixXd QNet::forward(const MatrixXd& x) const { return run(params_, shape_, layers_, x, nullptr).q; }

QNetOutput QNet::forward_detailed(const MatrixXd& x) const { return run(params_, shape_, layers_, x, nullptr); }

double QNet::loss(const MatrixXd& x, std::span<const int> actions, std::span<const double> targets) const {
  const MatrixXd q = forward(x);
  double sum = 0.0;
  for (Eigen::Index b = 0; b < q.cols(); ++b) {
    const double e = q(actions[static_cast<std::size_t>(b)], b) - targets[static_cast<std::size_t>(b)];
    sum += e * e;
  }
  return sum / static_cast<double>(q.cols());
}

double QNet::loss_and_gradient(const MatrixXd& x, std::span<const int> actions, std::span<const double> targets,
                               VectorXd& grad) const {
  const auto batch = x.cols();
  if (static_cast<Eigen::Index>(actions.size()) != batch || static_cast<Eigen::Index>(targets.size()) != batch) {
    throw Error("loss_and_gradient: batch size mismatch");
  }
  Tape tape;
  tape.input.resize(layers_.size());
  tape.pre.resize(layers_.size());
  const QNetOutput out = run(params_, shape_, layers_, x, &tape);

  MatrixXd dq = MatrixXd::Zero(shape_.actions, batch);
  double sum = 0.0;
  for (Eigen::Index b = 0; b < batch; ++b) {
    const int a = actions[static_cast<std::size_t>(b)];
    if (a < 0 || a >= shape_.actions) throw Error("loss_and_gradient: action out of range");
    const double e = out.q(a, b) - targets[static_cast<std::size_t>(b)];
    sum += e * e;
    dq(a, b) = 2.0 * e / static_cast<double>(batch);
  }

  grad = VectorXd::Zero(params_.size());
  const Ranges r = ranges(shape_, layers_);
  // Q_j = V + A_j - mean_k A_k.
  const Eigen::RowVectorXd dv = dq.colwise().sum();
  MatrixXd da = dq;
  da.rowwise() -= dv / static_cast<double>(shape_.actions);

  MatrixXd dh = backprop(params_, layers_, r.trunk_end, r.value_end, tape, dv, grad);
  dh += backprop(params_, layers_, r.value_end, r.adv_end, tape, da, grad);
  backprop(params_, layers_, 0, r.trunk_end, tape, dh, grad);
  return sum / static_cast<double>(batch);
}

Adam::Adam(std::size_t parameters, AdamParams params) : params_(params) {
  m_ = VectorXd::Zero(static_cast<Eigen::Index>(parameters));
  v_ = VectorXd::Zero(static_cast<Eigen::Index>(parameters));
}

void Adam::step(VectorXd& parameters, const VectorXd& grad) {
  if (grad.size() != m_.size() || parameters.size() != m_.size()) throw Error("Adam: size mismatch");
  ++t_;
  m_ = params_.beta1 * m_ + (1.0 - params_.beta1) * grad;
  v_ = params_.beta2 * v_ + (1.0 - params_.beta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(params_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(params_.beta2, static_cast<double>(t_));
  parameters.array() -=
      params_.learning_rate * (m_.array() / c1) / ((v_.array() / c2).sqrt() + params_.epsilon);
}

}  // namespace hwnroute::dqn
