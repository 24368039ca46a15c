#include "bt/intrinsic/rnd.hpp"

#include <algorithm>
#include <string>

namespace bt::intrinsic {

std::string_view to_string(PredictorKind kind) {
  return kind == PredictorKind::linear ? "linear" : "two_layer";
}

PredictorKind parse_predictor_kind(std::string_view text) {
  if (text == "two_layer") return PredictorKind::two_layer;
  if (text == "linear") return PredictorKind::linear;
  throw ConfigError("unknown intrinsic.rnd_predictor '" + std::string(text) + "'");
}

void RndConfig::validate() const {
  if (input_dim <= 0) throw ConfigError("RND input dimension must be positive");
  if (embed_dim <= 0) throw ConfigError("intrinsic.rnd_embed_dim must be positive");
  if (hidden <= 0) throw ConfigError("intrinsic.hidden must be positive");
  if (!(optimizer.step_size > 0.0)) throw ConfigError("intrinsic.rnd_step_size must be > 0");
  if (!(sigma_floor > 0.0)) throw ConfigError("intrinsic.sigma_floor must be > 0");
}

RndState::RndState(const RndConfig& config) : config_(config) {
  config_.validate();
  Rng rng(config_.seed);
  target_ = TwoLayerNet(config_.input_dim, config_.hidden, config_.embed_dim, rng);
  const int predictor_hidden = config_.predictor == PredictorKind::linear ? 0 : config_.hidden;
  predictor_ = TwoLayerNet(config_.input_dim, predictor_hidden, config_.embed_dim, rng);
  opt_ = Adam(predictor_.params(), config_.optimizer);
}

double RndState::sigma_e() const { return std::max(stats_.stddev(), config_.sigma_floor); }

void RndState::copy_target_into_predictor() {
  if (predictor_.is_linear()) throw UsageError("linear predictor cannot mirror the target");
  predictor_ = target_;
}

double RndState::loss_and_gradient(std::span<const std::span<const double>> batch,
                                   LayerParams* grads, std::vector<double>* errors) const {
  if (batch.empty()) throw ValidationError("rnd: empty batch");
  const auto n = static_cast<Eigen::Index>(batch.size());
  Eigen::MatrixXd x(config_.input_dim, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& obs = batch[static_cast<std::size_t>(j)];
    if (static_cast<int>(obs.size()) != config_.input_dim) {
      throw ValidationError("rnd: observation has dimension " + std::to_string(obs.size()) +
                            ", expected " + std::to_string(config_.input_dim));
    }
    x.col(j) = as_vector(obs);
  }
  // Batched forward passes; columns are samples.
  const auto& tp = target_.params();
  const Eigen::MatrixXd target_out =
      (tp.w2 * ((tp.w1 * x).colwise() + tp.b1).array().tanh().matrix()).colwise() + tp.b2;
  const auto& pp = predictor_.params();
  Eigen::MatrixXd hidden;
  Eigen::MatrixXd pred;
  if (predictor_.is_linear()) {
    pred = (pp.w2 * x).colwise() + pp.b2;
  } else {
    hidden = ((pp.w1 * x).colwise() + pp.b1).array().tanh().matrix();
    pred = (pp.w2 * hidden).colwise() + pp.b2;
  }
  const Eigen::MatrixXd diff = pred - target_out;
  const double inv_n = 1.0 / static_cast<double>(n);
  if (errors) {
    errors->resize(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) (*errors)[static_cast<std::size_t>(j)] = diff.col(j).squaredNorm();
  }
  if (grads) {
    const Eigen::MatrixXd g_out = diff * inv_n;
    grads->b2 += g_out.rowwise().sum();
    if (predictor_.is_linear()) {
      grads->w2.noalias() += g_out * x.transpose();
    } else {
      grads->w2.noalias() += g_out * hidden.transpose();
      const Eigen::MatrixXd g_pre =
          ((pp.w2.transpose() * g_out).array() * (1.0 - hidden.array().square())).matrix();
      grads->w1.noalias() += g_pre * x.transpose();
      grads->b1 += g_pre.rowwise().sum();
    }
  }
  return 0.5 * diff.squaredNorm() * inv_n;
}

double rnd_error(const RndState& rnd, std::span<const double> obs) {
  if (static_cast<int>(obs.size()) != rnd.config_.input_dim) {
    throw ValidationError("rnd_error: observation has dimension " + std::to_string(obs.size()) +
                          ", expected " + std::to_string(rnd.config_.input_dim));
  }
  const auto x = as_vector(obs);
  return (rnd.predictor_.forward(x) - rnd.target_.forward(x)).squaredNorm();
}

double rnd_train(RndState& rnd, std::span<const std::span<const double>> batch) {
  if (batch.empty()) throw ValidationError("rnd_train: empty batch");
  std::vector<double> errors;
  LayerParams grads = rnd.predictor_.params().zeros_like();
  rnd.loss_and_gradient(batch, &grads, &errors);
  rnd.opt_.step(rnd.predictor_.params(), grads);
  rnd.stats_.push_batch(errors);
  std::sort(errors.begin(), errors.end());
  double sum = 0.0;
  for (double e : errors) sum += e;
  return sum / static_cast<double>(errors.size());
}

double lifelong_modulator(const RndState& rnd, double err) {
  return (err - rnd.mu_e()) / rnd.sigma_e();
}

double rnd_reward(const RndState& rnd, double err) { return err / rnd.sigma_e(); }

}  // namespace bt::intrinsic
