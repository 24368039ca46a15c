#pragma once

#include "bt/common.hpp"

namespace bt::env {

/// One environment step as stored in replay.
///
/// `action` is the learning action in A+ (it may be the extra action);
/// `primitive_action` is what the environment executed. Besides the core
/// fields, a transition records whether the step was part of a flight, the
/// behaviour probability of `action` (used by off-policy corrections), and
/// whether it is a relabelled duplicate of the preceding entry.
struct Transition {
  StateId state = 0;
  ActionId action = 0;
  ActionId primitive_action = kNoAction;
  double reward_ext = 0.0;
  double reward_int = 0.0;
  StateId next_state = 0;
  bool terminal = false;
  bool truncated = false;
  bool from_pretrained = false;
  bool in_flight = false;
  bool is_duplicate = false;
  double behavior_prob = 1.0;
  EpisodeId episode_id = 0;

  bool operator==(const Transition&) const = default;
};

}  // namespace bt::env
