#include "bt/env/environment.hpp"

#include <deque>
#include <string>

namespace bt::env {

namespace {

// Chain kinds: 0 = left, 1 = right, 2 = no-op.
// Four rooms:  0 = up, 1 = down, 2 = left, 3 = right.
constexpr int kChainActions = 3;
constexpr int kGridActions = 4;
constexpr int kDr[kGridActions] = {-1, 1, 0, 0};
constexpr int kDc[kGridActions] = {0, 0, -1, 1};

bool is_wall(int n, int r, int c) {
  const int mid = n / 2;
  const int door_lo = n / 4;
  const int door_hi = (3 * n) / 4;
  if (r == mid) return !(c == door_lo || c == door_hi);
  if (c == mid) return !(r == door_lo || r == door_hi);
  return false;
}

}  // namespace

Environment::Environment(const EnvSpec& spec)
    : spec_(normalized(spec)), distractor_(effective_distractor(spec_)), rng_(spec_.seed) {
  build_geometry();
  state_ = start_;
}

void Environment::build_geometry() {
  const int n = spec_.size;
  if (spec_.kind == EnvKind::four_rooms) {
    num_actions_ = kGridActions;
    grid_index_.assign(static_cast<std::size_t>(n) * n, -1);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        if (is_wall(n, r, c)) continue;
        grid_index_[static_cast<std::size_t>(r) * n + c] = static_cast<StateId>(cells_.size());
        cells_.push_back({r, c});
      }
    }
    start_ = grid_index_[0];
    goal_ = grid_index_[static_cast<std::size_t>(n) * n - 1];
  } else {
    num_actions_ = kChainActions;
    for (int c = 0; c < n; ++c) cells_.push_back({0, c});
    start_ = 0;
    goal_ = n - 1;
  }

  const int S = num_states();
  successors_.resize(static_cast<std::size_t>(S) * num_actions_);
  for (StateId s = 0; s < S; ++s) {
    for (ActionId a = 0; a < num_actions_; ++a) {
      StateId next = s;
      if (spec_.kind == EnvKind::four_rooms) {
        const int r = cells_[s].row + kDr[a];
        const int c = cells_[s].col + kDc[a];
        if (r >= 0 && r < n && c >= 0 && c < n) {
          const StateId id = grid_index_[static_cast<std::size_t>(r) * n + c];
          if (id >= 0) next = id;
        }
      } else if (a == 0) {
        next = s > 0 ? s - 1 : s;
      } else if (a == 1) {
        next = s < S - 1 ? s + 1 : s;
      }
      successors_[static_cast<std::size_t>(s) * num_actions_ + a] = next;
    }
  }

  observations_.assign(static_cast<std::size_t>(S) * S, 0.0);
  for (StateId s = 0; s < S; ++s) observations_[static_cast<std::size_t>(s) * S + s] = 1.0;
}

std::span<const double> Environment::observation(StateId s) const {
  const auto S = static_cast<std::size_t>(num_states());
  return {observations_.data() + static_cast<std::size_t>(s) * S, S};
}

StateId Environment::reset() {
  state_ = start_;
  steps_ = 0;
  done_ = false;
  return state_;
}

StateId Environment::successor(StateId s, ActionId a) const {
  return successors_[static_cast<std::size_t>(s) * num_actions_ + a];
}

double Environment::reward(StateId s, ActionId /*a*/, StateId next) const {
  if (s == goal_) return 0.0;
  double r = 0.0;
  if (next == goal_ && next != s) {
    const bool shaped = spec_.kind == EnvKind::dense_line &&
                        spec_.reward_variant != RewardVariant::sparse_easy;
    if (!shaped) r += spec_.goal_reward;
  }
  if (spec_.kind == EnvKind::dense_line && spec_.reward_variant != RewardVariant::sparse_easy) {
    const double unit = spec_.goal_reward / static_cast<double>(spec_.size - 1);
    if (next == s + 1) r += unit;
    if (next == s - 1) r -= unit;
  }
  if (distractor_ != 0.0 && next == start_ && s != start_) r += distractor_;
  return r;
}

StepResult Environment::step(ActionId a) {
  if (done_) throw UsageError("step() called after the episode ended; call reset()");
  if (a < 0 || a >= num_actions_) {
    throw UsageError("step() requires a primitive action, got " + std::to_string(a));
  }
  if (spec_.slip > 0.0 && uniform01(rng_) < spec_.slip) {
    a = static_cast<ActionId>(uniform_index(rng_, num_actions_));
  }
  StepResult out;
  out.next_state = successor(state_, a);
  out.reward = reward(state_, a, out.next_state);
  ++steps_;
  out.terminal = is_goal(out.next_state);
  out.truncated = !out.terminal && steps_ >= spec_.episode_limit;
  done_ = out.done();
  state_ = out.next_state;
  return out;
}

Mdp Environment::to_mdp() const {
  const int S = num_states();
  const int A = num_actions_;
  Mdp mdp(S, A);
  mdp.d0[start_] = 1.0;
  mdp.terminal[goal_] = true;
  for (StateId s = 0; s < S; ++s) {
    for (ActionId a = 0; a < A; ++a) {
      if (s == goal_) {
        mdp.prob(s, a, s) = 1.0;
        continue;
      }
      mdp.prob(s, a, successor(s, a)) += 1.0 - spec_.slip;
      if (spec_.slip > 0.0) {
        for (ActionId b = 0; b < A; ++b) mdp.prob(s, a, successor(s, b)) += spec_.slip / A;
      }
      for (StateId next = 0; next < S; ++next) mdp.reward(s, a, next) = reward(s, a, next);
    }
  }
  return mdp;
}

int shortest_path_length(const Environment& env) {
  std::vector<int> dist(env.num_states(), -1);
  std::deque<StateId> frontier{env.start_state()};
  dist[env.start_state()] = 0;
  while (!frontier.empty()) {
    const StateId s = frontier.front();
    frontier.pop_front();
    if (env.is_goal(s)) return dist[s];
    for (ActionId a = 0; a < env.num_actions(); ++a) {
      const StateId next = env.successor(s, a);
      if (dist[next] < 0) {
        dist[next] = dist[s] + 1;
        frontier.push_back(next);
      }
    }
  }
  return -1;
}

}  // namespace bt::env
