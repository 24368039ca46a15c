#pragma once

#include <functional>
#include <span>
#include <vector>

#include "bt/env/observation_table.hpp"
#include "bt/env/transition.hpp"
#include "bt/learner/q_function.hpp"

namespace bt::learner {

enum class RewardSource { extrinsic, intrinsic };

inline double reward_of(const env::Transition& tr, RewardSource source) {
  return source == RewardSource::extrinsic ? tr.reward_ext : tr.reward_int;
}

/// Writes pi(. | s) over the function's outputs into `probs`.
using PolicyFn = std::function<void(StateId s, std::span<double> probs)>;

/// Greedy (lowest-index tie break) policy with respect to `qf`.
PolicyFn greedy_policy(const QFunction& qf, const env::ObservationTable& obs);

/// Checks that `seq` is one contiguous piece of one episode: a single
/// episode id, each non-duplicate entry starting where the previous one
/// ended, no entry after a terminal or truncated step, and duplicates only
/// directly after the entry they copy. Throws ValidationError otherwise.
void validate_sequence(std::span<const env::Transition> seq);

/// Peng's Q(lambda) targets, computed backwards:
///   G_t = r_t + gamma * [(1 - lambda) * max_a Qbar(s_{t+1}, a) + lambda * G_{t+1}]
/// A terminal step has G_t = r_t; the last step of a cut (non-terminal)
/// sequence bootstraps with max_a Qbar(s_{t+1}, a). Relabelled duplicates are
/// skipped when looking for the successor of an entry, so a duplicate
/// receives the same target as the entry it copies.
std::vector<double> peng_targets(std::span<const env::Transition> seq, const QFunction& target,
                                 const env::ObservationTable& obs, double gamma, double lambda,
                                 RewardSource source);

/// Retrace(lambda) targets with truncated importance weights
/// c_i = lambda * min(1, pi(a_i|s_i) / mu_i). `mu[i]` is the behaviour
/// probability of seq[i].action. Throws ValidationError on mu <= 0.
std::vector<double> retrace_targets(std::span<const env::Transition> seq, const QFunction& target,
                                    const env::ObservationTable& obs, const PolicyFn& pi,
                                    std::span<const double> mu, double gamma, double lambda,
                                    RewardSource source);

}  // namespace bt::learner
