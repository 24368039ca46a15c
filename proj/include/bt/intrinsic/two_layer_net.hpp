#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "bt/common.hpp"

namespace bt::intrinsic {

/// Weights of a two-layer fully connected network
///   y = w2 * tanh(w1 * x + b1) + b2
/// or, when the network is linear (no hidden layer), y = w2 * x + b2 with
/// w1 and b1 empty.
struct LayerParams {
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;
  Eigen::VectorXd b2;

  [[nodiscard]] LayerParams zeros_like() const;
  [[nodiscard]] std::size_t size() const { return w1.size() + b1.size() + w2.size() + b2.size(); }
  LayerParams& operator+=(const LayerParams& other);
  LayerParams& operator*=(double scale);
  bool operator==(const LayerParams& other) const;

  /// Visits every scalar in the fixed order w1, b1, w2, b2 (column-major).
  template <typename F>
  void for_each(F&& f) {
    for (Eigen::Index i = 0; i < w1.size(); ++i) f(w1.data()[i]);
    for (Eigen::Index i = 0; i < b1.size(); ++i) f(b1.data()[i]);
    for (Eigen::Index i = 0; i < w2.size(); ++i) f(w2.data()[i]);
    for (Eigen::Index i = 0; i < b2.size(); ++i) f(b2.data()[i]);
  }
};

class TwoLayerNet {
 public:
  TwoLayerNet() = default;
  /// Xavier-uniform weights, zero biases. `hidden == 0` builds a linear map.
  /// `output_scale` multiplies the initial output-layer weights (0 yields a
  /// network whose initial output is exactly b2 = 0).
  TwoLayerNet(int input_dim, int hidden_dim, int output_dim, Rng& rng, double output_scale = 1.0);

  [[nodiscard]] int input_dim() const { return input_dim_; }
  [[nodiscard]] int hidden_dim() const { return hidden_dim_; }
  [[nodiscard]] int output_dim() const { return output_dim_; }
  [[nodiscard]] bool is_linear() const { return hidden_dim_ == 0; }

  [[nodiscard]] LayerParams& params() { return params_; }
  [[nodiscard]] const LayerParams& params() const { return params_; }

  /// Hidden activations recorded by forward() for use in backward().
  struct Trace {
    Eigen::VectorXd hidden;
  };

  [[nodiscard]] Eigen::VectorXd forward(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::VectorXd forward(const Eigen::Ref<const Eigen::VectorXd>& x, Trace& trace) const;

  /// Accumulates dL/dparams into `grads` given dL/dy; optionally writes dL/dx.
  void backward(const Eigen::Ref<const Eigen::VectorXd>& x, const Trace& trace,
                const Eigen::Ref<const Eigen::VectorXd>& grad_out, LayerParams& grads,
                Eigen::VectorXd* grad_input = nullptr) const;

  bool operator==(const TwoLayerNet& other) const = default;

 private:
  int input_dim_ = 0;
  int hidden_dim_ = 0;
  int output_dim_ = 0;
  LayerParams params_;
};

struct AdamConfig {
  double step_size = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-4;
};

/// Adam with bias correction; one moment pair per parameter tensor.
class Adam {
 public:
  Adam() = default;
  Adam(const LayerParams& shape, AdamConfig config);

  void step(LayerParams& params, const LayerParams& grads);
  [[nodiscard]] const AdamConfig& config() const { return config_; }
  [[nodiscard]] std::uint64_t steps() const { return t_; }

 private:
  AdamConfig config_;
  LayerParams m_;
  LayerParams v_;
  std::uint64_t t_ = 0;
};

/// Standard normal draw (Box-Muller on the portable uniform generator).
double normal01(Rng& rng);

Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> x);

}  // namespace bt::intrinsic
