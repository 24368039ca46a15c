#include "bt/env/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <string>

namespace bt::env {

Mdp::Mdp(int states, int actions)
    : n_states(states),
      n_actions(actions),
      P(static_cast<std::size_t>(states) * actions * states, 0.0),
      R(P.size(), 0.0),
      d0(states, 0.0),
      terminal(states, false) {}

void Mdp::validate() const {
  constexpr double kTol = 1e-12;
  if (n_states <= 0 || n_actions <= 0) throw ValidationError("MDP needs states and actions");
  const auto S = static_cast<std::size_t>(n_states);
  if (P.size() != S * n_actions * S || R.size() != P.size() || d0.size() != S ||
      terminal.size() != S) {
    throw ValidationError("MDP table sizes do not match (states, actions)");
  }
  for (StateId s = 0; s < n_states; ++s) {
    for (ActionId a = 0; a < n_actions; ++a) {
      double sum = 0.0;
      for (StateId next = 0; next < n_states; ++next) {
        const double p = prob(s, a, next);
        if (!(p >= 0.0)) {
          throw ValidationError("negative transition probability at (" + std::to_string(s) + ", " +
                                std::to_string(a) + ")");
        }
        sum += p;
      }
      if (std::abs(sum - 1.0) > kTol) {
        throw ValidationError("transition row (" + std::to_string(s) + ", " + std::to_string(a) +
                              ") sums to " + std::to_string(sum));
      }
    }
  }
  double total = 0.0;
  for (double p : d0) {
    if (!(p >= 0.0)) throw ValidationError("negative initial-state probability");
    total += p;
  }
  if (std::abs(total - 1.0) > kTol) throw ValidationError("initial distribution does not sum to 1");
}

double QTable::max_value(StateId s) const {
  const auto* row = values.data() + static_cast<std::size_t>(s) * n_actions;
  return *std::max_element(row, row + n_actions);
}

ActionId QTable::argmax(StateId s) const {
  const auto* row = values.data() + static_cast<std::size_t>(s) * n_actions;
  return static_cast<ActionId>(std::max_element(row, row + n_actions) - row);
}

QTable bellman_backup(const Mdp& mdp, const QTable& q, double gamma) {
  QTable out{mdp.n_states, mdp.n_actions,
             std::vector<double>(static_cast<std::size_t>(mdp.n_states) * mdp.n_actions, 0.0)};
  std::vector<double> v(mdp.n_states, 0.0);
  for (StateId s = 0; s < mdp.n_states; ++s) {
    v[s] = mdp.terminal[s] ? 0.0 : q.max_value(s);
  }
  for (StateId s = 0; s < mdp.n_states; ++s) {
    if (mdp.terminal[s]) continue;
    for (ActionId a = 0; a < mdp.n_actions; ++a) {
      double acc = 0.0;
      for (StateId next = 0; next < mdp.n_states; ++next) {
        const double p = mdp.prob(s, a, next);
        if (p == 0.0) continue;
        acc += p * (mdp.reward(s, a, next) + gamma * v[next]);
      }
      out(s, a) = acc;
    }
  }
  return out;
}

double max_abs_diff(const QTable& a, const QTable& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    m = std::max(m, std::abs(a.values[i] - b.values[i]));
  }
  return m;
}

QTable value_iteration(const Mdp& mdp, double gamma, double tol) {
  if (!(tol > 0.0)) throw ValidationError("value_iteration requires tol > 0");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ValidationError("value_iteration requires gamma in [0, 1)");
  mdp.validate();
  QTable q{mdp.n_states, mdp.n_actions,
           std::vector<double>(static_cast<std::size_t>(mdp.n_states) * mdp.n_actions, 0.0)};
  const double stop = gamma > 0.0 ? tol * (1.0 - gamma) / gamma : 0.0;
  for (;;) {
    QTable next = bellman_backup(mdp, q, gamma);
    const double delta = max_abs_diff(next, q);
    q = std::move(next);
    if (delta <= stop) return q;
  }
}

void write_mdp(std::ostream& out, const Mdp& mdp) {
  out << mdp.n_states << ' ' << mdp.n_actions << '\n';
  out << std::setprecision(17);
  auto write_row = [&](auto first, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out << (i ? " " : "") << first[i];
    out << '\n';
  };
  write_row(mdp.d0.begin(), mdp.d0.size());
  for (int s = 0; s < mdp.n_states; ++s) out << (s ? " " : "") << (mdp.terminal[s] ? 1 : 0);
  out << '\n';
  const auto S = static_cast<std::size_t>(mdp.n_states);
  for (const auto* table : {&mdp.P, &mdp.R}) {
    for (std::size_t row = 0; row < S * mdp.n_actions; ++row) {
      write_row(table->begin() + static_cast<std::ptrdiff_t>(row * S), S);
    }
  }
}

Mdp read_mdp(std::istream& in) {
  int states = 0;
  int actions = 0;
  if (!(in >> states >> actions) || states <= 0 || actions <= 0) {
    throw ValidationError("MDP text: bad header, expected '<states> <actions>'");
  }
  Mdp mdp(states, actions);
  auto read = [&](double& x) {
    if (!(in >> x)) throw ValidationError("MDP text: truncated table");
  };
  for (auto& p : mdp.d0) read(p);
  for (int s = 0; s < states; ++s) {
    int flag = 0;
    if (!(in >> flag)) throw ValidationError("MDP text: truncated terminal flags");
    mdp.terminal[s] = flag != 0;
  }
  for (auto& p : mdp.P) read(p);
  for (auto& r : mdp.R) read(r);
  mdp.validate();
  return mdp;
}

}  // namespace bt::env
