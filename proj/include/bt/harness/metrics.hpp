#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bt/harness/run_record.hpp"

namespace bt::harness {

/// metrics.csv columns, in order:
///   env_steps, mean_return, median_return, first_goal_step,
///   extra_action_usage, flight_fraction, unique_states,
///   mean_episode_length, intrinsic_error, wall_time_s
/// One row per evaluation. Reals are written with %.10g.
const std::vector<std::string>& metrics_columns();

void write_metrics_csv(std::ostream& out, const RunRecord& record);

/// Static SVG line chart with env_steps on the x axis and one polyline per
/// series.
struct Series {
  std::string name;
  std::vector<double> values;
};
std::string render_svg(const std::string& title, const std::vector<double>& x,
                       const std::vector<Series>& series);

/// Writes metrics.csv and one <column>.svg per metric column into `out_dir`
/// (created if missing). The extra_action_usage chart adds a 20-row moving
/// average. Throws IoError when the directory is not writable.
void emit_metrics(const RunRecord& record, const std::string& out_dir);

/// Parses a metrics.csv written by write_metrics_csv.
RunRecord read_metrics_csv(std::istream& in);

}  // namespace bt::harness
