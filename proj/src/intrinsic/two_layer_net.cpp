#include "bt/intrinsic/two_layer_net.hpp"

#include <cmath>
#include <numbers>

namespace bt::intrinsic {

namespace {

void xavier_fill(Eigen::MatrixXd& w, Rng& rng, double scale) {
  const double bound = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols())) * scale;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    w.data()[i] = (2.0 * uniform01(rng) - 1.0) * bound;
  }
}

}  // namespace

LayerParams LayerParams::zeros_like() const {
  return {Eigen::MatrixXd::Zero(w1.rows(), w1.cols()), Eigen::VectorXd::Zero(b1.size()),
          Eigen::MatrixXd::Zero(w2.rows(), w2.cols()), Eigen::VectorXd::Zero(b2.size())};
}

LayerParams& LayerParams::operator+=(const LayerParams& other) {
  w1 += other.w1;
  b1 += other.b1;
  w2 += other.w2;
  b2 += other.b2;
  return *this;
}

LayerParams& LayerParams::operator*=(double scale) {
  w1 *= scale;
  b1 *= scale;
  w2 *= scale;
  b2 *= scale;
  return *this;
}

bool LayerParams::operator==(const LayerParams& other) const {
  auto same = [](const auto& a, const auto& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && (a.size() == 0 || a == b);
  };
  return same(w1, other.w1) && same(b1, other.b1) && same(w2, other.w2) && same(b2, other.b2);
}

TwoLayerNet::TwoLayerNet(int input_dim, int hidden_dim, int output_dim, Rng& rng,
                         double output_scale)
    : input_dim_(input_dim), hidden_dim_(hidden_dim), output_dim_(output_dim) {
  if (input_dim <= 0 || hidden_dim < 0 || output_dim <= 0) {
    throw ValidationError("TwoLayerNet: dimensions must be positive");
  }
  const int head_in = hidden_dim > 0 ? hidden_dim : input_dim;
  params_.w1 = Eigen::MatrixXd::Zero(hidden_dim, hidden_dim > 0 ? input_dim : 0);
  params_.b1 = Eigen::VectorXd::Zero(hidden_dim);
  params_.w2 = Eigen::MatrixXd::Zero(output_dim, head_in);
  params_.b2 = Eigen::VectorXd::Zero(output_dim);
  if (hidden_dim > 0) xavier_fill(params_.w1, rng, 1.0);
  if (output_scale != 0.0) xavier_fill(params_.w2, rng, output_scale);
}

Eigen::VectorXd TwoLayerNet::forward(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Trace trace;
  return forward(x, trace);
}

Eigen::VectorXd TwoLayerNet::forward(const Eigen::Ref<const Eigen::VectorXd>& x,
                                     Trace& trace) const {
  if (x.size() != input_dim_) {
    throw ValidationError("TwoLayerNet: input has dimension " + std::to_string(x.size()) +
                          ", expected " + std::to_string(input_dim_));
  }
  if (is_linear()) {
    trace.hidden = x;
  } else {
    trace.hidden = (params_.w1 * x + params_.b1).array().tanh().matrix();
  }
  return params_.w2 * trace.hidden + params_.b2;
}

void TwoLayerNet::backward(const Eigen::Ref<const Eigen::VectorXd>& x, const Trace& trace,
                           const Eigen::Ref<const Eigen::VectorXd>& grad_out, LayerParams& grads,
                           Eigen::VectorXd* grad_input) const {
  grads.w2.noalias() += grad_out * trace.hidden.transpose();
  grads.b2 += grad_out;
  Eigen::VectorXd grad_hidden = params_.w2.transpose() * grad_out;
  if (is_linear()) {
    if (grad_input) *grad_input = std::move(grad_hidden);
    return;
  }
  // d tanh(z) / dz = 1 - tanh(z)^2
  const Eigen::VectorXd grad_pre =
      (grad_hidden.array() * (1.0 - trace.hidden.array().square())).matrix();
  grads.w1.noalias() += grad_pre * x.transpose();
  grads.b1 += grad_pre;
  if (grad_input) *grad_input = params_.w1.transpose() * grad_pre;
}

Adam::Adam(const LayerParams& shape, AdamConfig config)
    : config_(config), m_(shape.zeros_like()), v_(shape.zeros_like()) {}

void Adam::step(LayerParams& params, const LayerParams& grads) {
  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  auto update = [&](auto& p, auto& m, auto& v, const auto& g) {
    if (p.size() == 0) return;
    m = config_.beta1 * m + (1.0 - config_.beta1) * g;
    v = config_.beta2 * v + (1.0 - config_.beta2) * g.cwiseProduct(g);
    p.array() -= config_.step_size * (m.array() / c1) / ((v.array() / c2).sqrt() + config_.epsilon);
  };
  update(params.w1, m_.w1, v_.w1, grads.w1);
  update(params.b1, m_.b1, v_.b1, grads.b1);
  update(params.w2, m_.w2, v_.w2, grads.w2);
  update(params.b2, m_.b2, v_.b2, grads.b2);
}

double normal01(Rng& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> x) {
  return {x.data(), static_cast<Eigen::Index>(x.size())};
}

}  // namespace bt::intrinsic
