#pragma once

#include <ostream>
#include <string>

#include "pdifmp/analysis.hpp"
#include "pdifmp/state.hpp"
#include "pdifmp/trajectory.hpp"

namespace pdifmp {

/// Shortest round-trip decimal form; identical bytes on every platform that
/// implements std::to_chars correctly.
std::string format_double(double x);

/// Columns t, y0, y1, ..., v, is_jump. `v` is the mode's value.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const ModeSet& modes);

/// Full-grid JSON object: times, y (one array per sample), modes (values),
/// is_jump, jump_times, proposal_times and the jump records.
void write_trajectory_json(std::ostream& os, const Trajectory& traj, const ModeSet& modes);

/// Columns h, metric, stderr, M.
void write_results_csv(std::ostream& os, const ConvergenceReport& report);

/// Columns log2_h, log2_metric, ref_slope_05, ref_slope_1. The reference
/// lines pass through the coarsest-h row. Throws on an empty report.
void emit_plot_data(std::ostream& os, const ConvergenceReport& report);

}  // namespace pdifmp
