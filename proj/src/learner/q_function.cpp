#include "bt/learner/q_function.hpp"

#include <cmath>
#include <string>

namespace bt::learner {

std::string_view to_string(ReprMode mode) {
  return mode == ReprMode::tabular ? "tabular" : "encoder_head";
}

ReprMode parse_repr_mode(std::string_view text) {
  if (text == "tabular") return ReprMode::tabular;
  if (text == "encoder_head") return ReprMode::encoder_head;
  throw ConfigError("unknown learner.repr '" + std::string(text) + "'");
}

std::string_view to_string(InitMode mode) {
  switch (mode) {
    case InitMode::scratch: return "scratch";
    case InitMode::partial: return "partial";
    case InitMode::full: return "full";
  }
  return "?";
}

InitMode parse_init_mode(std::string_view text) {
  if (text == "scratch") return InitMode::scratch;
  if (text == "partial") return InitMode::partial;
  if (text == "full") return InitMode::full;
  throw ConfigError("unknown run.init_mode '" + std::string(text) + "'");
}

namespace {

void xavier(Eigen::MatrixXd& w, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = (2.0 * uniform01(rng) - 1.0) * bound;
}

}  // namespace

QFunction QFunction::tabular(int n_states, int n_actions, bool extra_action) {
  if (n_states <= 0 || n_actions <= 0) throw ConfigError("Q-table needs positive dimensions");
  QFunction qf;
  qf.mode_ = ReprMode::tabular;
  qf.input_dim_ = n_states;
  qf.feature_dim_ = n_states;
  qf.n_actions_ = n_actions;
  qf.extra_ = extra_action;
  qf.params_.w1 = Eigen::MatrixXd::Identity(n_states, n_states);
  qf.params_.b1 = Eigen::VectorXd::Zero(n_states);
  qf.params_.w2 = Eigen::MatrixXd::Zero(qf.n_outputs(), n_states);
  qf.params_.b2 = Eigen::VectorXd::Zero(qf.n_outputs());
  return qf;
}

QFunction QFunction::encoder_head(int input_dim, int feature_dim, int n_actions, bool extra_action,
                                  Rng& rng) {
  if (input_dim <= 0 || feature_dim <= 0 || n_actions <= 0) {
    throw ConfigError("encoder_head needs positive dimensions");
  }
  QFunction qf;
  qf.mode_ = ReprMode::encoder_head;
  qf.input_dim_ = input_dim;
  qf.feature_dim_ = feature_dim;
  qf.n_actions_ = n_actions;
  qf.extra_ = extra_action;
  qf.params_.w1.resize(feature_dim, input_dim);
  xavier(qf.params_.w1, rng);
  qf.params_.b1 = Eigen::VectorXd::Zero(feature_dim);
  qf.params_.w2.resize(qf.n_outputs(), feature_dim);
  xavier(qf.params_.w2, rng);
  qf.params_.b2 = Eigen::VectorXd::Zero(qf.n_outputs());
  return qf;
}

Eigen::VectorXd QFunction::features(const Obs& s) const {
  if (mode_ == ReprMode::tabular) {
    if (s.id < 0 || s.id >= input_dim_) throw ValidationError("Q-table: state id out of range");
    return params_.w1.col(s.id);
  }
  if (static_cast<int>(s.x.size()) != input_dim_) {
    throw ValidationError("encoder_head: observation has dimension " + std::to_string(s.x.size()) +
                          ", expected " + std::to_string(input_dim_));
  }
  return (params_.w1 * intrinsic::as_vector(s.x) + params_.b1).array().tanh().matrix();
}

Eigen::VectorXd QFunction::q_values(const Obs& s) const {
  if (mode_ == ReprMode::tabular) {
    if (s.id < 0 || s.id >= input_dim_) throw ValidationError("Q-table: state id out of range");
    return params_.w2.col(s.id) + params_.b2;
  }
  return params_.w2 * features(s) + params_.b2;
}

double QFunction::q(const Obs& s, ActionId a) const {
  if (a < 0 || a >= n_outputs()) throw ValidationError("Q-function: action out of range");
  if (mode_ == ReprMode::tabular) return params_.w2(a, s.id) + params_.b2[a];
  return q_values(s)[a];
}

void QFunction::set_q(StateId s, ActionId a, double value) {
  if (mode_ != ReprMode::tabular) throw UsageError("set_q is only defined for tabular functions");
  params_.w2(a, s) = value - params_.b2[a];
}

void QFunction::reinit_head(Rng& rng) {
  if (mode_ == ReprMode::tabular) {
    params_.w2.setZero();
  } else {
    xavier(params_.w2, rng);
  }
  params_.b2.setZero();
}

bool QFunction::operator==(const QFunction& other) const {
  return mode_ == other.mode_ && input_dim_ == other.input_dim_ &&
         feature_dim_ == other.feature_dim_ && n_actions_ == other.n_actions_ &&
         extra_ == other.extra_ && params_ == other.params_;
}

ActionId argmax(const Eigen::Ref<const Eigen::VectorXd>& values) {
  ActionId best = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = static_cast<ActionId>(i);
  }
  return best;
}

QFunction init_from_checkpoint(QFunction fresh, const QFunction& ckpt, InitMode mode) {
  if (mode == InitMode::scratch) return fresh;
  if (fresh.mode() != ckpt.mode() || fresh.params().w1.rows() != ckpt.params().w1.rows() ||
      fresh.params().w1.cols() != ckpt.params().w1.cols()) {
    throw ValidationError("init_from_checkpoint: encoder shape mismatch (checkpoint " +
                          std::string(to_string(ckpt.mode())) + " " +
                          std::to_string(ckpt.params().w1.rows()) + "x" +
                          std::to_string(ckpt.params().w1.cols()) + ", expected " +
                          std::string(to_string(fresh.mode())) + " " +
                          std::to_string(fresh.params().w1.rows()) + "x" +
                          std::to_string(fresh.params().w1.cols()) + ")");
  }
  if (fresh.n_actions_base() != ckpt.n_actions_base()) {
    throw ValidationError("init_from_checkpoint: head action count mismatch (checkpoint " +
                          std::to_string(ckpt.n_actions_base()) + ", expected " +
                          std::to_string(fresh.n_actions_base()) + ")");
  }
  fresh.params().w1 = ckpt.params().w1;
  fresh.params().b1 = ckpt.params().b1;
  if (mode == InitMode::partial) return fresh;

  if (ckpt.has_extra_action() && !fresh.has_extra_action()) {
    throw ValidationError("init_from_checkpoint: head has an extra action the target lacks");
  }
  const int rows = ckpt.n_outputs();
  fresh.params().w2.topRows(rows) = ckpt.params().w2;
  fresh.params().b2.head(rows) = ckpt.params().b2;
  return fresh;
}

}  // namespace bt::learner
