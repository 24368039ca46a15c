#pragma once

#include <Eigen/Dense>
#include <span>
#include <string_view>
#include <vector>

#include "bt/common.hpp"
#include "bt/intrinsic/running_stats.hpp"
#include "bt/intrinsic/two_layer_net.hpp"

namespace bt::intrinsic {

enum class PredictorKind { two_layer, linear };

std::string_view to_string(PredictorKind kind);
PredictorKind parse_predictor_kind(std::string_view text);

struct RndConfig {
  int input_dim = 0;
  int embed_dim = 16;
  int hidden = 32;
  PredictorKind predictor = PredictorKind::two_layer;
  AdamConfig optimizer{1e-3, 0.9, 0.999, 1e-8};
  double sigma_floor = 1e-8;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Frozen random target g and trainable predictor g_hat. The error
/// statistics (mu_e, sigma_e) are one accumulator shared by the life-long
/// modulator and the standalone RND reward.
class RndState {
 public:
  RndState() = default;
  explicit RndState(const RndConfig& config);

  [[nodiscard]] const RndConfig& config() const { return config_; }
  [[nodiscard]] const TwoLayerNet& target() const { return target_; }
  [[nodiscard]] const TwoLayerNet& predictor() const { return predictor_; }
  [[nodiscard]] TwoLayerNet& predictor() { return predictor_; }
  [[nodiscard]] const RunningStats& stats() const { return stats_; }
  [[nodiscard]] double mu_e() const { return stats_.mean(); }
  /// Running standard deviation with the floor applied.
  [[nodiscard]] double sigma_e() const;

  /// Test hook: copy the target weights into the predictor. Only valid when
  /// the predictor has the target's architecture.
  void copy_target_into_predictor();
  /// Test hook: overwrite the statistics.
  void set_stats(const RunningStats& stats) { stats_ = stats; }

  /// Folds errors into mu_e / sigma_e without training.
  void observe_errors(std::span<const double> errors) { stats_.push_batch(errors); }

  /// Batch mean of 0.5 * ||g_hat(s) - g(s)||^2. Accumulates the gradient
  /// w.r.t. the predictor into `grads` and writes the per-sample errors
  /// ||g_hat(s) - g(s)||^2 into `errors` when given.
  double loss_and_gradient(std::span<const std::span<const double>> batch, LayerParams* grads,
                           std::vector<double>* errors = nullptr) const;

  friend double rnd_error(const RndState& rnd, std::span<const double> obs);
  friend double rnd_train(RndState& rnd, std::span<const std::span<const double>> batch);

  bool operator==(const RndState& other) const {
    return target_ == other.target_ && predictor_ == other.predictor_ && stats_ == other.stats_;
  }

 private:
  RndConfig config_;
  TwoLayerNet target_;
  TwoLayerNet predictor_;
  Adam opt_;
  RunningStats stats_;
};

/// ||g_hat(s) - g(s)||^2. Pure.
double rnd_error(const RndState& rnd, std::span<const double> obs);

/// One Adam step on the predictor minimizing the mean error over the batch.
/// The batch's pre-step errors are folded into the statistics. Returns the
/// pre-step mean error.
double rnd_train(RndState& rnd, std::span<const std::span<const double>> batch);

/// (err - mu_e) / max(sigma_e, sigma_floor).
double lifelong_modulator(const RndState& rnd, double err);

/// err / max(sigma_e, sigma_floor).
double rnd_reward(const RndState& rnd, double err);

}  // namespace bt::intrinsic
