#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bt/env/environment.hpp"
#include "bt/env/observation_table.hpp"
#include "bt/explore/frozen_policy.hpp"
#include "bt/harness/checkpoint.hpp"
#include "bt/harness/config.hpp"
#include "bt/harness/run_record.hpp"
#include "bt/learner/q_function.hpp"
#include "bt/replay/sequence_buffer.hpp"

namespace bt::harness {

struct EvalSummary {
  std::vector<double> returns;
  double mean_return = 0.0;
  double median_return = 0.0;
  double extra_action_usage = 0.0;  // fraction of steps where a+ was the greedy choice
  double mean_episode_length = 0.0;
  double unique_states = 0.0;       // mean distinct states per episode
  std::vector<StateId> visited;     // distinct states over all episodes, ascending
};

/// Greedy rollouts (epsilon = 0, lowest-index ties) over the function's
/// outputs; a+ is executed as pi_p's action.
EvalSummary evaluate(const learner::QFunction& q, const explore::FrozenPolicy* pi_p,
                     const env::ObservationTable& obs, env::Environment& env, int episodes);

struct RunResult {
  RunRecord record;
  Checkpoint checkpoint;             // final online value function
  std::string policy_digest_before;  // empty without a pre-trained policy
  std::string policy_digest_after;
  replay::ReplayStats replay;
  std::uint64_t learner_updates = 0;
  int max_snapshot_staleness = 0;    // largest actor-side snapshot age, in that actor's env steps
};

/// Reward-free pre-training on the intrinsic reward (NGU or RND) with
/// Retrace(lambda) over the primitive actions.
RunResult pretrain_run(const ExperimentConfig& cfg);

/// Downstream learning with Peng's Q(lambda) on the extrinsic reward.
/// `pretrained` overrides run.pretrained_checkpoint when given. Throws
/// ConfigError on an architecture mismatch and IntegrityError if the frozen
/// policy's digest changed during the run.
RunResult transfer_run(const ExperimentConfig& cfg, const Checkpoint* pretrained = nullptr);

/// Dispatches on run.phase.
RunResult run_experiment(const ExperimentConfig& cfg, const Checkpoint* pretrained = nullptr);

/// Deterministic 64-bit seed derivation (splitmix64 over the inputs).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index = 0);

}  // namespace bt::harness
