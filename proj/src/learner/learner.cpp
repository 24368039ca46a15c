#include "bt/learner/learner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

namespace bt::learner {

void LearnerConfig::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("learner.gamma must be in [0, 1)");
  if (!(lambda_q >= 0.0 && lambda_q <= 1.0)) throw ConfigError("learner.lambda_q must be in [0, 1]");
  if (!(lambda_retrace >= 0.0 && lambda_retrace <= 1.0)) {
    throw ConfigError("learner.lambda_retrace must be in [0, 1]");
  }
  if (target_period < 1) throw ConfigError("learner.target_period must be >= 1");
  if (!(adam.step_size > 0.0)) throw ConfigError("learner.step_size must be > 0");
  if (!(tabular_step_size > 0.0 && tabular_step_size <= 1.0)) {
    throw ConfigError("learner.tabular_step_size must be in (0, 1]");
  }
  if (!(priority_eta >= 0.0 && priority_eta <= 1.0)) {
    throw ConfigError("learner.priority_eta must be in [0, 1]");
  }
}

double sequence_priority(std::span<const double> abs_td, double eta) {
  if (abs_td.empty()) return 0.0;
  double mx = 0.0;
  double sum = 0.0;
  for (double d : abs_td) {
    mx = std::max(mx, std::abs(d));
    sum += std::abs(d);
  }
  return eta * mx + (1.0 - eta) * sum / static_cast<double>(abs_td.size());
}

Learner::Learner(QFunction online, const LearnerConfig& config, const env::ObservationTable* obs)
    : config_(config), obs_(obs), online_(std::move(online)) {
  config_.validate();
  if (online_.mode() == ReprMode::encoder_head && obs_ == nullptr) {
    throw UsageError("encoder_head learner needs an observation table");
  }
  target_ = online_;
  adam_ = intrinsic::Adam(online_.params(), config_.adam);
}

namespace {

Obs obs_for(const env::ObservationTable* table, StateId s) {
  return table ? Obs{s, table->row(s)} : Obs{s, {}};
}

void check_item(const QFunction& qf, const TrainingItem& item) {
  if (item.action < 0 || item.action >= qf.n_outputs()) {
    throw ValidationError("apply_update: action " + std::to_string(item.action) +
                          " outside the head's " + std::to_string(qf.n_outputs()) + " outputs");
  }
  if (qf.mode() == ReprMode::tabular && (item.state < 0 || item.state >= qf.input_dim())) {
    throw ValidationError("apply_update: state out of range");
  }
}

}  // namespace

double Learner::loss_and_gradient(std::span<const TrainingSequence> batch,
                                  intrinsic::LayerParams* grads) const {
  std::size_t n = 0;
  for (const auto& seq : batch) n += seq.size();
  if (n == 0) throw ValidationError("apply_update: empty batch");
  const double inv_n = 1.0 / static_cast<double>(n);
  const auto& p = online_.params();
  double loss = 0.0;
  for (const auto& seq : batch) {
    for (const auto& item : seq) {
      check_item(online_, item);
      const Obs o = obs_for(obs_, item.state);
      const double delta = item.target - online_.q(o, item.action);
      loss += 0.5 * delta * delta * inv_n;
      if (!grads) continue;
      // dL/dq_a = -delta / n
      const double g = -delta * inv_n;
      if (online_.mode() == ReprMode::tabular) {
        grads->w2(item.action, item.state) += g;
        grads->b2[item.action] += g;
        continue;
      }
      const Eigen::VectorXd phi = online_.features(o);
      grads->w2.row(item.action) += g * phi.transpose();
      grads->b2[item.action] += g;
      const Eigen::VectorXd dphi = g * p.w2.row(item.action).transpose();
      const Eigen::VectorXd dpre = dphi.array() * (1.0 - phi.array().square());
      grads->w1 += dpre * intrinsic::as_vector(o.x).transpose();
      grads->b1 += dpre;
    }
  }
  return loss;
}

std::vector<double> Learner::apply_update(std::span<const TrainingSequence> batch) {
  std::vector<double> priorities;
  priorities.reserve(batch.size());
  std::vector<double> abs_td;
  for (const auto& seq : batch) {
    abs_td.clear();
    for (const auto& item : seq) {
      check_item(online_, item);
      abs_td.push_back(std::abs(item.target - online_.q(obs_for(obs_, item.state), item.action)));
    }
    priorities.push_back(sequence_priority(abs_td, config_.priority_eta));
  }

  if (online_.mode() == ReprMode::tabular) {
    std::map<std::pair<StateId, ActionId>, std::pair<double, int>> acc;
    for (const auto& seq : batch) {
      for (const auto& item : seq) {
        auto& slot = acc[{item.state, item.action}];
        slot.first += item.target - online_.q({item.state, {}}, item.action);
        slot.second += 1;
      }
    }
    if (acc.empty()) throw ValidationError("apply_update: empty batch");
    for (const auto& [key, sum_count] : acc) {
      online_.table_entry(key.first, key.second) +=
          config_.tabular_step_size * sum_count.first / sum_count.second;
    }
  } else {
    intrinsic::LayerParams grads = online_.params().zeros_like();
    loss_and_gradient(batch, &grads);
    adam_.step(online_.params(), grads);
  }

  ++updates_;
  if (updates_ % static_cast<std::uint64_t>(config_.target_period) == 0) sync_target();
  return priorities;
}

}  // namespace bt::learner
