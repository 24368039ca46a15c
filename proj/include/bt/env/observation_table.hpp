#pragma once

#include <span>
#include <vector>

#include "bt/common.hpp"
#include "bt/env/environment.hpp"

namespace bt::env {

/// Immutable copy of every state's observation vector, shared by learner and
/// actors so value functions can be evaluated on stored state ids.
struct ObservationTable {
  int n_states = 0;
  int dim = 0;
  std::vector<double> data;

  [[nodiscard]] std::span<const double> row(StateId s) const {
    return {data.data() + static_cast<std::size_t>(s) * dim, static_cast<std::size_t>(dim)};
  }

  static ObservationTable one_hot(int n) {
    ObservationTable t{n, n, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0)};
    for (int i = 0; i < n; ++i) t.data[static_cast<std::size_t>(i) * n + i] = 1.0;
    return t;
  }

  static ObservationTable from(const Environment& env) {
    ObservationTable t{env.num_states(), env.observation_dim(), {}};
    t.data.reserve(static_cast<std::size_t>(t.n_states) * t.dim);
    for (StateId s = 0; s < t.n_states; ++s) {
      const auto r = env.observation(s);
      t.data.insert(t.data.end(), r.begin(), r.end());
    }
    return t;
  }
};

}  // namespace bt::env
