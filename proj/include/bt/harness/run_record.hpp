#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bt::harness {

/// One evaluation point.
struct EvalRow {
  std::int64_t env_steps = 0;
  double mean_return = 0.0;
  double median_return = 0.0;
  std::int64_t first_goal_step = -1;  // env step of the first goal reached by any actor, -1 if none yet
  double extra_action_usage = 0.0;    // fraction of greedy evaluation steps choosing a+
  double flight_fraction = 0.0;       // fraction of actor steps in flights since the previous row
  double unique_states = 0.0;         // distinct states per evaluation episode (mean)
  double mean_episode_length = 0.0;
  double intrinsic_error = 0.0;       // mean RND error over evaluation states (pre-training only)
  double wall_time_s = 0.0;

  /// Equality on every field except wall time.
  [[nodiscard]] bool same_results(const EvalRow& other) const;
};

struct RunRecord {
  std::vector<EvalRow> rows;

  /// Throws ValidationError unless env_steps is strictly increasing.
  void append(const EvalRow& row);
  [[nodiscard]] bool same_results(const RunRecord& other) const;
};

/// Trailing moving average with the given window (shorter at the start).
std::vector<double> moving_average(const std::vector<double>& xs, std::size_t window);

double median(std::vector<double> xs);

}  // namespace bt::harness
