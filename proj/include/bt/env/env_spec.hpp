#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace bt::env {

enum class EnvKind { chain, four_rooms, dense_line };
enum class RewardVariant { standard, sparse_easy, deceptive_hard };

/// Declarative description of a finite environment.
///
/// `chain` and `dense_line` share the same geometry (cells 0..size-1, start at
/// 0, goal at size-1, actions {left, right, no-op}); `dense_line` adds a
/// per-move shaping reward. `four_rooms` is a size x size grid split into four
/// rooms by one wall row and one wall column, each pierced by two doorways.
///
/// Reward variants:
///   standard       - the kind's native reward
///   sparse_easy    - goal reward only (shaping removed, no distractor)
///   deceptive_hard - native reward plus `distractor_reward` paid whenever
///                    the agent re-enters the start cell from a neighbour
struct EnvSpec {
  EnvKind kind = EnvKind::chain;
  int size = 10;
  RewardVariant reward_variant = RewardVariant::standard;
  std::optional<double> distractor_reward;
  double goal_reward = 1.0;
  int episode_limit = 0;  // 0 selects the default of 4 * size
  double slip = 0.0;      // probability of replacing the action by a uniform one
  std::uint64_t seed = 0;
};

/// Fills defaults and checks every invariant. Throws ConfigError naming the
/// violated constraint.
EnvSpec normalized(EnvSpec spec);

/// Distractor magnitude after normalization (0 unless deceptive_hard).
double effective_distractor(const EnvSpec& spec);

std::string_view to_string(EnvKind kind);
std::string_view to_string(RewardVariant variant);
EnvKind parse_env_kind(std::string_view text);
RewardVariant parse_reward_variant(std::string_view text);

}  // namespace bt::env
