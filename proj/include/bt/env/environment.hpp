#pragma once

#include <span>
#include <vector>

#include "bt/common.hpp"
#include "bt/env/env_spec.hpp"
#include "bt/env/mdp.hpp"

namespace bt::env {

struct StepResult {
  StateId next_state = 0;
  double reward = 0.0;
  bool terminal = false;   // goal reached; the episode ends without bootstrap
  bool truncated = false;  // episode limit reached in a non-terminal state

  [[nodiscard]] bool done() const { return terminal || truncated; }
};

/// Finite, fully observable environment built from an EnvSpec.
///
/// Observations are one-hot vectors over states. Dynamics are deterministic
/// unless `slip > 0`, in which case the slip draws come from a generator
/// seeded by the spec, so identical seeds and action sequences reproduce
/// identical transitions.
class Environment {
 public:
  explicit Environment(const EnvSpec& spec);

  [[nodiscard]] const EnvSpec& spec() const { return spec_; }
  [[nodiscard]] int num_states() const { return static_cast<int>(cells_.size()); }
  [[nodiscard]] int num_actions() const { return num_actions_; }
  [[nodiscard]] int observation_dim() const { return num_states(); }
  [[nodiscard]] std::span<const double> observation(StateId s) const;

  [[nodiscard]] StateId start_state() const { return start_; }
  [[nodiscard]] StateId goal_state() const { return goal_; }
  [[nodiscard]] bool is_goal(StateId s) const { return s == goal_; }
  [[nodiscard]] int steps() const { return steps_; }
  [[nodiscard]] StateId state() const { return state_; }

  StateId reset();
  /// Throws UsageError after the episode ended or for a non-primitive action.
  StepResult step(ActionId a);

  /// Deterministic successor of `s` under action `a` (ignores slip).
  [[nodiscard]] StateId successor(StateId s, ActionId a) const;
  [[nodiscard]] double reward(StateId s, ActionId a, StateId next) const;

  /// Explicit tables of this environment (the episode limit is not part of
  /// the MDP).
  [[nodiscard]] Mdp to_mdp() const;

  /// Grid coordinates of a state (chain kinds use row 0).
  struct Cell {
    int row = 0;
    int col = 0;
  };
  [[nodiscard]] Cell cell(StateId s) const { return cells_[s]; }

 private:
  void build_geometry();

  EnvSpec spec_;
  double distractor_ = 0.0;
  int num_actions_ = 0;
  std::vector<Cell> cells_;
  std::vector<StateId> grid_index_;  // row-major grid -> state id, -1 for walls
  std::vector<StateId> successors_;  // (s, a) -> s'
  std::vector<double> observations_;
  StateId start_ = 0;
  StateId goal_ = 0;
  StateId state_ = 0;
  int steps_ = 0;
  bool done_ = false;
  Rng rng_;
};

/// Length of the shortest action sequence from start to goal.
int shortest_path_length(const Environment& env);

}  // namespace bt::env
