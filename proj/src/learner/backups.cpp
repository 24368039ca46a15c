#include "bt/learner/backups.hpp"

#include <cmath>
#include <string>

namespace bt::learner {

namespace {

Obs obs_of(const env::ObservationTable& obs, StateId s) { return {s, obs.row(s)}; }

// Index of the next non-duplicate entry after t, or seq.size().
std::vector<std::size_t> successors(std::span<const env::Transition> seq) {
  std::vector<std::size_t> next(seq.size(), seq.size());
  std::size_t upcoming = seq.size();
  for (std::size_t t = seq.size(); t-- > 0;) {
    next[t] = upcoming;
    if (!seq[t].is_duplicate) upcoming = t;
  }
  return next;
}

}  // namespace

PolicyFn greedy_policy(const QFunction& qf, const env::ObservationTable& obs) {
  return [&qf, &obs](StateId s, std::span<double> probs) {
    const Eigen::VectorXd q = qf.q_values(obs_of(obs, s));
    for (double& p : probs) p = 0.0;
    probs[static_cast<std::size_t>(argmax(q))] = 1.0;
  };
}

void validate_sequence(std::span<const env::Transition> seq) {
  if (seq.empty()) throw ValidationError("sequence is empty");
  if (seq.front().is_duplicate) throw ValidationError("sequence starts with a duplicate");
  const env::Transition* prev = &seq.front();
  for (std::size_t t = 1; t < seq.size(); ++t) {
    const auto& tr = seq[t];
    if (tr.episode_id != seq.front().episode_id) {
      throw ValidationError("sequence crosses an episode boundary (episode " +
                            std::to_string(seq.front().episode_id) + " then " +
                            std::to_string(tr.episode_id) + ")");
    }
    if (tr.is_duplicate) {
      if (tr.state != prev->state || tr.next_state != prev->next_state) {
        throw ValidationError("duplicate does not match the entry it copies");
      }
      continue;
    }
    if (prev->terminal || prev->truncated) {
      throw ValidationError("sequence continues past the end of its episode");
    }
    if (tr.state != prev->next_state) {
      throw ValidationError("sequence is not contiguous at index " + std::to_string(t));
    }
    prev = &tr;
  }
}

std::vector<double> peng_targets(std::span<const env::Transition> seq, const QFunction& target,
                                 const env::ObservationTable& obs, double gamma, double lambda,
                                 RewardSource source) {
  validate_sequence(seq);
  const auto next = successors(seq);
  std::vector<double> g(seq.size());
  for (std::size_t t = seq.size(); t-- > 0;) {
    const auto& tr = seq[t];
    const double r = reward_of(tr, source);
    if (tr.terminal) {
      g[t] = r;
      continue;
    }
    const double bootstrap = target.q_values(obs_of(obs, tr.next_state)).maxCoeff();
    if (next[t] == seq.size()) {
      g[t] = r + gamma * bootstrap;
    } else {
      g[t] = r + gamma * ((1.0 - lambda) * bootstrap + lambda * g[next[t]]);
    }
  }
  return g;
}

std::vector<double> retrace_targets(std::span<const env::Transition> seq, const QFunction& target,
                                    const env::ObservationTable& obs, const PolicyFn& pi,
                                    std::span<const double> mu, double gamma, double lambda,
                                    RewardSource source) {
  validate_sequence(seq);
  if (mu.size() != seq.size()) throw ValidationError("retrace: behaviour probabilities misaligned");
  for (std::size_t t = 0; t < mu.size(); ++t) {
    if (!(mu[t] > 0.0)) {
      throw ValidationError("retrace: behaviour probability at index " + std::to_string(t) +
                            " is not positive");
    }
  }
  const auto next = successors(seq);
  const auto n_out = static_cast<std::size_t>(target.n_outputs());
  std::vector<double> probs(n_out);
  std::vector<double> q_taken(seq.size());
  std::vector<double> trace(seq.size());
  std::vector<double> delta(seq.size());
  for (std::size_t t = 0; t < seq.size(); ++t) {
    const auto& tr = seq[t];
    const Eigen::VectorXd q = target.q_values(obs_of(obs, tr.state));
    q_taken[t] = q[tr.action];
    pi(tr.state, probs);
    trace[t] = lambda * std::min(1.0, probs[static_cast<std::size_t>(tr.action)] / mu[t]);
    double expected_next = 0.0;
    if (!tr.terminal) {
      const Eigen::VectorXd qn = target.q_values(obs_of(obs, tr.next_state));
      pi(tr.next_state, probs);
      for (std::size_t a = 0; a < n_out; ++a) expected_next += probs[a] * qn[static_cast<Eigen::Index>(a)];
    }
    delta[t] = reward_of(tr, source) + gamma * expected_next - q_taken[t];
  }
  std::vector<double> out(seq.size());
  for (std::size_t t = seq.size(); t-- > 0;) {
    out[t] = q_taken[t] + delta[t];
    const std::size_t j = next[t];
    if (j < seq.size() && !seq[t].terminal) {
      out[t] += gamma * trace[j] * (out[j] - q_taken[j]);
    }
  }
  return out;
}

}  // namespace bt::learner
