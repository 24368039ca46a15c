#pragma once

#include <span>
#include <vector>

#include "bt/env/observation_table.hpp"
#include "bt/intrinsic/two_layer_net.hpp"
#include "bt/learner/q_function.hpp"

namespace bt::learner {

struct LearnerConfig {
  double gamma = 0.99;
  double lambda_q = 0.7;
  double lambda_retrace = 0.95;
  int target_period = 1500;
  intrinsic::AdamConfig adam{2e-4, 0.9, 0.999, 1e-4};
  /// Step size of the tabular update Q(s,a) += alpha * mean TD error.
  double tabular_step_size = 0.5;
  double priority_eta = 0.9;

  void validate() const;
};

/// One (state, action, target) regression entry.
struct TrainingItem {
  StateId state = 0;
  ActionId action = 0;
  double target = 0.0;
};

using TrainingSequence = std::vector<TrainingItem>;

/// eta * max|delta| + (1 - eta) * mean|delta|.
double sequence_priority(std::span<const double> abs_td, double eta);

/// Online and target value functions plus the optimizer.
///
/// encoder_head functions take one Adam step on the mean of 0.5 * delta^2
/// over all entries in the batch. Tabular functions move every entry touched
/// by the batch by alpha times the mean TD error of that entry's samples.
class Learner {
 public:
  Learner() = default;
  Learner(QFunction online, const LearnerConfig& config, const env::ObservationTable* obs);

  [[nodiscard]] const LearnerConfig& config() const { return config_; }
  [[nodiscard]] const QFunction& online() const { return online_; }
  [[nodiscard]] QFunction& online() { return online_; }
  [[nodiscard]] const QFunction& target() const { return target_; }
  [[nodiscard]] std::uint64_t update_count() const { return updates_; }

  /// One optimizer step. Returns one priority per sequence computed from the
  /// pre-step TD errors. Syncs the target every target_period updates.
  std::vector<double> apply_update(std::span<const TrainingSequence> batch);

  void sync_target() { target_ = online_; }

  /// Mean 0.5 * delta^2 over every entry of the batch; accumulates the
  /// gradient w.r.t. the online parameters when `grads` is given.
  double loss_and_gradient(std::span<const TrainingSequence> batch,
                           intrinsic::LayerParams* grads) const;

 private:
  LearnerConfig config_;
  const env::ObservationTable* obs_ = nullptr;
  QFunction online_;
  QFunction target_;
  intrinsic::Adam adam_;
  std::uint64_t updates_ = 0;
};

}  // namespace bt::learner
