#include "pdifmp/trajectory.hpp"

#include <algorithm>
#include <string>

#include "pdifmp/error.hpp"

namespace pdifmp {

void Trajectory::start(double t, std::span<const double> y, ModeIndex v) {
    jump_times_.assign(1, t);
    interval_modes_.assign(1, v);
    push_sample(t, y, v);
}

void Trajectory::push_sample(double t, std::span<const double> y, ModeIndex v) {
    times_.push_back(t);
    values_.insert(values_.end(), y.begin(), y.end());
    modes_.push_back(v);
    flags_.push_back(0);
}

void Trajectory::record_jump(const JumpRecord& jump) {
    const std::size_t last = times_.size() - 1;
    std::copy(jump.y_post.begin(), jump.y_post.end(), values_.begin() + static_cast<std::ptrdiff_t>(last * dim_));
    modes_[last] = jump.to;
    flags_[last] = 1;
    jumps_.push_back(jump);
    jump_times_.push_back(jump.time);
    interval_modes_.push_back(jump.to);
}

void Trajectory::reserve(std::size_t samples) {
    times_.reserve(samples);
    values_.reserve(samples * dim_);
    modes_.reserve(samples);
    flags_.reserve(samples);
}

HybridState Trajectory::final_state() const {
    if (times_.empty()) fail(ErrorKind::argument, "empty trajectory has no final state");
    const std::size_t last = times_.size() - 1;
    return {StateVector(y(last)), modes_[last], times_[last]};
}

void check_trajectory(const Trajectory& traj, double horizon, bool continuous_y) {
    const auto broken = [](const std::string& what) {
        fail(ErrorKind::model_definition, "trajectory invariant broken: " + what);
    };
    if (traj.size() == 0) broken("no samples");
    const auto times = traj.times();
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) broken("grid times not strictly increasing at index " + std::to_string(i));
    }
    if (times.back() > horizon) broken("grid extends beyond the horizon");

    const auto on_grid = [&](double t) { return std::binary_search(times.begin(), times.end(), t); };
    const auto& jt = traj.jump_times();
    for (std::size_t n = 1; n < jt.size(); ++n) {
        if (!(jt[n] > jt[n - 1])) broken("jump times not increasing");
        if (jt[n] > horizon) broken("jump after the horizon");
        if (!on_grid(jt[n])) broken("jump time missing from the grid");
    }
    for (double t : traj.proposal_times()) {
        if (!on_grid(t)) broken("proposal time missing from the grid");
    }
    if (traj.jump_count() != jt.size() - 1) broken("jump count differs from the number of jump times");
    if (traj.jump_count() > traj.proposal_times().size()) broken("more accepted jumps than proposals");
    if (traj.interval_modes().size() != jt.size()) broken("one mode per inter-jump interval expected");

    // Modes are piecewise constant: between T_n and T_{n+1} the grid carries v_n.
    std::size_t interval = 0;
    std::size_t flagged = 0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        if (traj.is_jump(i)) {
            ++interval;
            ++flagged;
            if (interval >= jt.size() || jt[interval] != times[i]) broken("jump flag does not match a jump time");
        }
        if (traj.mode(i) != traj.interval_modes()[interval]) broken("mode changes between jumps");
    }
    if (flagged != traj.jump_count()) broken("flagged jump samples differ from the jump count");

    for (const auto& jump : traj.jumps()) {
        if (jump.from == jump.to) broken("no-move jump");
        if (continuous_y && !(jump.y_pre == jump.y_post)) broken("continuous component changed at a jump");
    }
}

}  // namespace pdifmp
