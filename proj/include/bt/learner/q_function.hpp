#pragma once

#include <Eigen/Dense>
#include <span>
#include <string_view>

#include "bt/common.hpp"
#include "bt/intrinsic/two_layer_net.hpp"

namespace bt::learner {

enum class ReprMode { tabular, encoder_head };

std::string_view to_string(ReprMode mode);
ReprMode parse_repr_mode(std::string_view text);

/// A state presented to a value function. Tabular functions read `id`;
/// encoder_head functions read `x`.
struct Obs {
  StateId id = 0;
  std::span<const double> x;
};

/// Action-value function over A (or A+ when the extra action is enabled).
///
/// Parameters are kept as one LayerParams: (w1, b1) is the encoder and
/// (w2, b2) the linear head.
///   tabular:      phi(s) = one-hot(s) (w1 = I, b1 = 0), Q(s, .) = w2.col(s)
///   encoder_head: phi(x) = tanh(w1 x + b1),            Q(x, .) = w2 phi + b2
/// The extra action, when present, is the last output index.
class QFunction {
 public:
  QFunction() = default;

  /// Zero-initialized Q-table.
  static QFunction tabular(int n_states, int n_actions, bool extra_action);
  /// Xavier-uniform weights, zero biases.
  static QFunction encoder_head(int input_dim, int feature_dim, int n_actions, bool extra_action,
                                Rng& rng);

  [[nodiscard]] ReprMode mode() const { return mode_; }
  [[nodiscard]] int input_dim() const { return input_dim_; }
  [[nodiscard]] int feature_dim() const { return feature_dim_; }
  [[nodiscard]] int n_actions_base() const { return n_actions_; }
  [[nodiscard]] bool has_extra_action() const { return extra_; }
  [[nodiscard]] int n_outputs() const { return n_actions_ + (extra_ ? 1 : 0); }
  /// Index of a+ (valid only with the extra action).
  [[nodiscard]] ActionId extra_action() const { return n_actions_; }

  [[nodiscard]] intrinsic::LayerParams& params() { return params_; }
  [[nodiscard]] const intrinsic::LayerParams& params() const { return params_; }

  [[nodiscard]] Eigen::VectorXd features(const Obs& s) const;
  [[nodiscard]] Eigen::VectorXd q_values(const Obs& s) const;
  [[nodiscard]] double q(const Obs& s, ActionId a) const;

  /// Tabular test hook and update path.
  void set_q(StateId s, ActionId a, double value);
  double& table_entry(StateId s, ActionId a) { return params_.w2(a, s); }

  /// Re-initializes the head the way a fresh function of this shape would be
  /// (zeros for tabular, Xavier for encoder_head).
  void reinit_head(Rng& rng);

  bool operator==(const QFunction& other) const;

 private:
  ReprMode mode_ = ReprMode::tabular;
  int input_dim_ = 0;
  int feature_dim_ = 0;
  int n_actions_ = 0;
  bool extra_ = false;
  intrinsic::LayerParams params_;
};

/// Lowest-index argmax.
ActionId argmax(const Eigen::Ref<const Eigen::VectorXd>& values);

enum class InitMode { scratch, partial, full };

std::string_view to_string(InitMode mode);
InitMode parse_init_mode(std::string_view text);

/// Builds the transfer value function from `fresh` (already initialized as a
/// scratch function of the target shape) and the checkpointed function.
///   scratch: fresh unchanged
///   partial: encoder copied, head left fresh
///   full:    encoder and head copied. When `fresh` adds the extra action to a
///            checkpoint without it, the |A| primitive rows are copied and the
///            a+ row keeps its fresh initialization.
/// Throws ValidationError naming the incompatible component.
QFunction init_from_checkpoint(QFunction fresh, const QFunction& ckpt, InitMode mode);

}  // namespace bt::learner
