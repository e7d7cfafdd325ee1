#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "pdifmp/state.hpp"

namespace pdifmp {

struct JumpRecord {
    double time = 0.0;
    StateVector y_pre;
    StateVector y_post;
    ModeIndex from = 0;
    ModeIndex to = 0;
};

/// Counters accumulated while simulating one path.
struct PathStats {
    std::size_t proposals = 0;  ///< N*_T
    std::size_t cells = 0;
    std::size_t bound_violations = 0;
    std::size_t excursions = 0;  ///< cells ending outside the model's state hint
    double rate_min = std::numeric_limits<double>::infinity();
    double rate_max = -std::numeric_limits<double>::infinity();
};

/// A simulated path on its jump-adapted grid.
///
/// Grid samples are right-continuous: at an accepted jump time the stored
/// state is the post-jump one, and the left limit is kept in `jumps`.
class Trajectory {
 public:
    explicit Trajectory(std::size_t dim = 1) : dim_(dim) {}

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return times_.size(); }

    double time(std::size_t i) const { return times_[i]; }
    std::span<const double> y(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }
    ModeIndex mode(std::size_t i) const { return modes_[i]; }
    bool is_jump(std::size_t i) const { return flags_[i] != 0; }

    std::span<const double> times() const noexcept { return times_; }
    std::span<const ModeIndex> modes() const noexcept { return modes_; }

    /// T_0 = start, T_1 < T_2 < ... accepted jump times.
    const std::vector<double>& jump_times() const noexcept { return jump_times_; }
    /// Mode in force on [T_n, T_{n+1}).
    const std::vector<ModeIndex>& interval_modes() const noexcept { return interval_modes_; }
    const std::vector<JumpRecord>& jumps() const noexcept { return jumps_; }
    const std::vector<double>& proposal_times() const noexcept { return proposal_times_; }
    std::size_t jump_count() const noexcept { return jumps_.size(); }

    HybridState final_state() const;

    PathStats stats;

    void start(double t, std::span<const double> y, ModeIndex v);
    void push_sample(double t, std::span<const double> y, ModeIndex v);
    void record_proposal(double t) { proposal_times_.push_back(t); }
    /// Marks the last sample as an accepted jump and overwrites it with the
    /// post-jump state.
    void record_jump(const JumpRecord& jump);
    void reserve(std::size_t samples);

 private:
    std::size_t dim_;
    std::vector<double> times_;
    std::vector<double> values_;
    std::vector<ModeIndex> modes_;
    std::vector<std::uint8_t> flags_;
    std::vector<double> jump_times_;
    std::vector<ModeIndex> interval_modes_;
    std::vector<JumpRecord> jumps_;
    std::vector<double> proposal_times_;
};

/// Structural invariants: strictly increasing grid, jump and proposal times on
/// the grid, N_T = number of jumps in (T_0, T], N_T <= N*_T, modes constant
/// between jumps. When `continuous_y` is set, y_pre == y_post bit-exactly.
/// Throws a model_definition error describing the first violation.
void check_trajectory(const Trajectory& traj, double horizon, bool continuous_y);

}  // namespace pdifmp
