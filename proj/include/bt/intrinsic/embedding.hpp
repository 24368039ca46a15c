#pragma once

#include <Eigen/Dense>
#include <span>
#include <string_view>
#include <vector>

#include "bt/common.hpp"
#include "bt/intrinsic/two_layer_net.hpp"

namespace bt::intrinsic {

enum class EmbeddingMode { identity, random_projection, inverse_dynamics };

std::string_view to_string(EmbeddingMode mode);
EmbeddingMode parse_embedding_mode(std::string_view text);

struct EmbeddingConfig {
  EmbeddingMode mode = EmbeddingMode::identity;
  int input_dim = 0;
  int dim_out = 0;   // 0 selects input_dim for identity
  int hidden = 32;   // inverse_dynamics only
  int n_actions = 0; // inverse_dynamics only
  AdamConfig optimizer{1e-3, 0.9, 0.999, 1e-8};
  std::uint64_t seed = 0;
};

/// One (s_t, a_t, s_{t+1}) sample for the inverse-dynamics objective.
struct DynamicsSample {
  std::span<const double> obs;
  ActionId action = 0;
  std::span<const double> next_obs;
};

/// Controllable-state embedding f : S -> R^p.
///
/// identity and random_projection are frozen after construction. The
/// inverse_dynamics mode embeds with a two-layer network and trains it jointly
/// with a two-layer action classifier on (f(s_t), f(s_{t+1})) by softmax
/// cross-entropy. The classifier's output layer starts at zero, so the initial
/// prediction is uniform over actions.
class EmbeddingFn {
 public:
  EmbeddingFn() = default;
  explicit EmbeddingFn(const EmbeddingConfig& config);

  [[nodiscard]] EmbeddingMode mode() const { return config_.mode; }
  [[nodiscard]] int input_dim() const { return config_.input_dim; }
  [[nodiscard]] int dim_out() const { return config_.dim_out; }
  [[nodiscard]] bool trainable() const { return config_.mode == EmbeddingMode::inverse_dynamics; }

  /// Throws ValidationError on an observation of the wrong dimension.
  [[nodiscard]] Eigen::VectorXd embed(std::span<const double> obs) const;

  /// Mean cross-entropy of the action classifier over the batch. When the
  /// gradient pointers are given, the batch-mean gradients are accumulated
  /// into them.
  double inverse_dynamics_loss(std::span<const DynamicsSample> batch,
                               LayerParams* encoder_grad = nullptr,
                               LayerParams* classifier_grad = nullptr) const;

  /// One Adam step on encoder and classifier; returns the loss before the
  /// step. Throws UsageError outside inverse_dynamics mode.
  double train_inverse_dynamics(std::span<const DynamicsSample> batch);

  [[nodiscard]] const Eigen::MatrixXd& projection() const { return projection_; }
  [[nodiscard]] TwoLayerNet& encoder() { return encoder_; }
  [[nodiscard]] const TwoLayerNet& encoder() const { return encoder_; }
  [[nodiscard]] TwoLayerNet& classifier() { return classifier_; }
  [[nodiscard]] const TwoLayerNet& classifier() const { return classifier_; }

 private:
  EmbeddingConfig config_;
  Eigen::MatrixXd projection_;
  TwoLayerNet encoder_;
  TwoLayerNet classifier_;
  Adam encoder_opt_;
  Adam classifier_opt_;
};

}  // namespace bt::intrinsic
