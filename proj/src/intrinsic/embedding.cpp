#include "bt/intrinsic/embedding.hpp"

#include <cmath>
#include <string>

namespace bt::intrinsic {

std::string_view to_string(EmbeddingMode mode) {
  switch (mode) {
    case EmbeddingMode::identity: return "identity";
    case EmbeddingMode::random_projection: return "random_projection";
    case EmbeddingMode::inverse_dynamics: return "inverse_dynamics";
  }
  return "?";
}

EmbeddingMode parse_embedding_mode(std::string_view text) {
  if (text == "identity") return EmbeddingMode::identity;
  if (text == "random_projection") return EmbeddingMode::random_projection;
  if (text == "inverse_dynamics") return EmbeddingMode::inverse_dynamics;
  throw ConfigError("unknown intrinsic.embedding '" + std::string(text) + "'");
}

EmbeddingFn::EmbeddingFn(const EmbeddingConfig& config) : config_(config) {
  if (config_.input_dim <= 0) throw ConfigError("embedding input dimension must be positive");
  if (config_.dim_out == 0) config_.dim_out = config_.input_dim;
  if (config_.dim_out < 0) throw ConfigError("embedding dimension must be positive");
  Rng rng(config_.seed);
  switch (config_.mode) {
    case EmbeddingMode::identity:
      if (config_.dim_out != config_.input_dim) {
        throw ConfigError("identity embedding requires dim_out == observation dimension");
      }
      break;
    case EmbeddingMode::random_projection: {
      projection_.resize(config_.dim_out, config_.input_dim);
      const double scale = 1.0 / std::sqrt(static_cast<double>(config_.dim_out));
      for (Eigen::Index i = 0; i < projection_.size(); ++i) {
        projection_.data()[i] = normal01(rng) * scale;
      }
      break;
    }
    case EmbeddingMode::inverse_dynamics:
      if (config_.n_actions <= 0) {
        throw ConfigError("inverse_dynamics embedding needs the number of actions");
      }
      encoder_ = TwoLayerNet(config_.input_dim, config_.hidden, config_.dim_out, rng);
      classifier_ =
          TwoLayerNet(2 * config_.dim_out, config_.hidden, config_.n_actions, rng, /*output_scale=*/0.0);
      encoder_opt_ = Adam(encoder_.params(), config_.optimizer);
      classifier_opt_ = Adam(classifier_.params(), config_.optimizer);
      break;
  }
}

Eigen::VectorXd EmbeddingFn::embed(std::span<const double> obs) const {
  if (static_cast<int>(obs.size()) != config_.input_dim) {
    throw ValidationError("embed: observation has dimension " + std::to_string(obs.size()) +
                          ", expected " + std::to_string(config_.input_dim));
  }
  const auto x = as_vector(obs);
  switch (config_.mode) {
    case EmbeddingMode::identity: return x;
    case EmbeddingMode::random_projection: return projection_ * x;
    case EmbeddingMode::inverse_dynamics: return encoder_.forward(x);
  }
  return x;
}

double EmbeddingFn::inverse_dynamics_loss(std::span<const DynamicsSample> batch,
                                          LayerParams* encoder_grad,
                                          LayerParams* classifier_grad) const {
  if (!trainable()) throw UsageError("inverse_dynamics_loss: embedding is frozen");
  if (batch.empty()) throw ValidationError("inverse_dynamics_loss: empty batch");
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  const int p = config_.dim_out;
  double loss = 0.0;
  for (const auto& sample : batch) {
    if (sample.action < 0 || sample.action >= config_.n_actions) {
      throw ValidationError("inverse_dynamics_loss: action out of range");
    }
    TwoLayerNet::Trace t0;
    TwoLayerNet::Trace t1;
    TwoLayerNet::Trace tc;
    const auto x0 = as_vector(sample.obs);
    const auto x1 = as_vector(sample.next_obs);
    const Eigen::VectorXd e0 = encoder_.forward(x0, t0);
    const Eigen::VectorXd e1 = encoder_.forward(x1, t1);
    Eigen::VectorXd joint(2 * p);
    joint << e0, e1;
    const Eigen::VectorXd logits = classifier_.forward(joint, tc);
    const double shift = logits.maxCoeff();
    const Eigen::VectorXd exps = (logits.array() - shift).exp().matrix();
    const double z = exps.sum();
    loss += -(logits[sample.action] - shift - std::log(z));
    if (!encoder_grad && !classifier_grad) continue;

    Eigen::VectorXd grad_logits = exps / z;
    grad_logits[sample.action] -= 1.0;
    grad_logits *= inv_n;
    LayerParams scratch = classifier_.params().zeros_like();
    Eigen::VectorXd grad_joint;
    classifier_.backward(joint, tc, grad_logits, classifier_grad ? *classifier_grad : scratch,
                         &grad_joint);
    if (encoder_grad) {
      encoder_.backward(x0, t0, grad_joint.head(p), *encoder_grad);
      encoder_.backward(x1, t1, grad_joint.tail(p), *encoder_grad);
    }
  }
  return loss * inv_n;
}

double EmbeddingFn::train_inverse_dynamics(std::span<const DynamicsSample> batch) {
  if (!trainable()) {
    throw UsageError("train_inverse_dynamics called on a frozen " +
                     std::string(to_string(config_.mode)) + " embedding");
  }
  LayerParams enc_grad = encoder_.params().zeros_like();
  LayerParams cls_grad = classifier_.params().zeros_like();
  const double loss = inverse_dynamics_loss(batch, &enc_grad, &cls_grad);
  encoder_opt_.step(encoder_.params(), enc_grad);
  classifier_opt_.step(classifier_.params(), cls_grad);
  return loss;
}

}  // namespace bt::intrinsic
