#pragma once

#include <string>
#include <vector>

#include "bt/common.hpp"
#include "bt/env/observation_table.hpp"
#include "bt/learner/q_function.hpp"

namespace bt::explore {

/// SHA-256 of `data` as lowercase hex.
std::string sha256_hex(std::string_view data);

/// The pre-trained policy used during transfer. Always returns a primitive
/// action. Greedy policies act by argmax over the primitive outputs of the
/// checkpointed Q-function; the action table is computed once at
/// construction.
class FrozenPolicy {
 public:
  enum class Kind { greedy_from_checkpoint, scripted };

  FrozenPolicy() = default;
  static FrozenPolicy greedy(learner::QFunction qf, const env::ObservationTable& obs);
  static FrozenPolicy scripted(std::vector<ActionId> table, int n_actions);

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] int n_actions() const { return n_actions_; }
  [[nodiscard]] ActionId act(StateId s) const;
  [[nodiscard]] const std::vector<ActionId>& table() const { return table_; }
  [[nodiscard]] const learner::QFunction& q_function() const { return qf_; }

  /// Digest of the serialized policy (Q parameters for greedy policies, the
  /// rule table for scripted ones).
  [[nodiscard]] std::string digest() const;

 private:
  Kind kind_ = Kind::scripted;
  int n_actions_ = 0;
  learner::QFunction qf_;
  std::vector<ActionId> table_;
};

}  // namespace bt::explore
