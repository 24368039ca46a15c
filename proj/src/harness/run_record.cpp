#include "bt/harness/run_record.hpp"

#include <algorithm>

#include "bt/common.hpp"

namespace bt::harness {

bool EvalRow::same_results(const EvalRow& o) const {
  return env_steps == o.env_steps && mean_return == o.mean_return &&
         median_return == o.median_return && first_goal_step == o.first_goal_step &&
         extra_action_usage == o.extra_action_usage && flight_fraction == o.flight_fraction &&
         unique_states == o.unique_states && mean_episode_length == o.mean_episode_length &&
         intrinsic_error == o.intrinsic_error;
}

void RunRecord::append(const EvalRow& row) {
  if (!rows.empty() && row.env_steps <= rows.back().env_steps) {
    throw ValidationError("run record rows must have strictly increasing env_steps");
  }
  rows.push_back(row);
}

bool RunRecord::same_results(const RunRecord& other) const {
  if (rows.size() != other.rows.size()) return false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].same_results(other.rows[i])) return false;
  }
  return true;
}

std::vector<double> moving_average(const std::vector<double>& xs, std::size_t window) {
  std::vector<double> out(xs.size());
  if (window == 0) window = 1;
  double sum = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sum += xs[i];
    if (i >= window) sum -= xs[i - window];
    out[i] = sum / static_cast<double>(std::min(i + 1, window));
  }
  return out;
}

double median(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace bt::harness
