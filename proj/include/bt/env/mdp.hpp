#pragma once

#include <iosfwd>
#include <vector>

#include "bt/common.hpp"

namespace bt::env {

/// Explicit-table finite MDP, used as a test oracle.
///
/// Tables are flat and indexed (s, a, s') -> (s * A + a) * S + s'.
/// A state flagged in `terminal` ends the episode on entry: it is never
/// bootstrapped from and its action values are zero.
struct Mdp {
  int n_states = 0;
  int n_actions = 0;
  std::vector<double> P;
  std::vector<double> R;
  std::vector<double> d0;
  std::vector<bool> terminal;

  Mdp() = default;
  Mdp(int states, int actions);

  [[nodiscard]] std::size_t index(StateId s, ActionId a, StateId next) const {
    return (static_cast<std::size_t>(s) * n_actions + a) * n_states + next;
  }
  double& prob(StateId s, ActionId a, StateId next) { return P[index(s, a, next)]; }
  double prob(StateId s, ActionId a, StateId next) const { return P[index(s, a, next)]; }
  double& reward(StateId s, ActionId a, StateId next) { return R[index(s, a, next)]; }
  double reward(StateId s, ActionId a, StateId next) const { return R[index(s, a, next)]; }

  /// Throws ValidationError unless every P row and d0 sum to 1 within 1e-12
  /// and all probabilities are non-negative.
  void validate() const;
};

/// Q-table, row-major over (state, action).
struct QTable {
  int n_states = 0;
  int n_actions = 0;
  std::vector<double> values;

  double operator()(StateId s, ActionId a) const {
    return values[static_cast<std::size_t>(s) * n_actions + a];
  }
  double& operator()(StateId s, ActionId a) {
    return values[static_cast<std::size_t>(s) * n_actions + a];
  }
  [[nodiscard]] double max_value(StateId s) const;
  [[nodiscard]] ActionId argmax(StateId s) const;  // lowest index on ties
};

/// One application of the Bellman optimality operator.
QTable bellman_backup(const Mdp& mdp, const QTable& q, double gamma);

/// Solves for Q* by value iteration. Iterates until successive iterates
/// differ by at most tol * (1 - gamma) / gamma in max-norm, which bounds both
/// the Bellman residual and the distance to Q* by tol.
QTable value_iteration(const Mdp& mdp, double gamma, double tol);

double max_abs_diff(const QTable& a, const QTable& b);

/// Text format:
///   line 1:  "<states> <actions>"
///   line 2:  d0, one value per state
///   line 3:  terminal flags (0/1), one per state
///   then S*A rows of P(s, a, .) in (s, a) row-major order,
///   then S*A rows of R(s, a, .) in the same order.
/// Values are written with 17 significant digits so round trips are exact.
void write_mdp(std::ostream& out, const Mdp& mdp);
Mdp read_mdp(std::istream& in);

}  // namespace bt::env
