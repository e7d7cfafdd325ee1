#include "pdifmp/jump_engine.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "pdifmp/error.hpp"

namespace pdifmp {
namespace {

struct Lane {
    const FlowIntegrator* integrator;
    StateVector y;
    ModeIndex v;
    Trajectory traj;
};

struct RunResult {
    std::vector<Trajectory> trajectories;
    bool jumped = false;
    double stop_time = 0.0;
    StateVector pre_jump_y;
};

// Draw-order contract, per path:
//   1. poisson:  one draw per proposal (inter-arrival time), before its cells;
//   2. wiener:   m draws per grid cell, in time order, channel-major;
//   3. thinning: one draw per proposal T*_k <= T, after the cells up to T*_k;
//   4. kernel:   two draws per proposal T*_k <= T (V_k, then the jump-update
//                uniform), drawn whether or not any lane accepts.
RunResult run(const PDifMPModel& model, std::span<const FlowIntegrator* const> integrators, DriverStream& stream,
              const SimulationOptions& options, const HybridState& start, bool stop_at_first_jump) {
    check_model_shape(model);
    const double h = options.step;
    const double horizon = options.horizon.value_or(model.horizon);
    if (!(h > 0.0) || !std::isfinite(h)) fail(ErrorKind::argument, "step size must be positive");
    if (!(horizon > 0.0)) fail(ErrorKind::argument, "horizon must be positive");
    if (!(start.t < horizon)) fail(ErrorKind::argument, "start time must precede the horizon");
    if (start.y.size() != model.dim || !model.modes.contains(start.v)) {
        fail(ErrorKind::argument, "start state does not fit the model");
    }
    if (integrators.empty()) fail(ErrorKind::argument, "at least one integrator is required");
    const std::size_t stride = options.record_stride == 0 ? 1 : options.record_stride;

    std::vector<Lane> lanes;
    lanes.reserve(integrators.size());
    const auto expected_cells = static_cast<std::size_t>((horizon - start.t) / h) + 2;
    for (const auto* integrator : integrators) {
        Lane lane{integrator, start.y, start.v, Trajectory(model.dim)};
        lane.traj.reserve(expected_cells / stride + 8);
        lane.traj.start(start.t, start.y.span(), start.v);
        lanes.push_back(std::move(lane));
    }

    RunResult result;
    std::array<double, kMaxStateDim> dW{};
    const std::span<double> noise(dW.data(), model.noise_dim);
    std::size_t proposals = 0;
    std::size_t interior = 0;
    double t = start.t;

    while (t < horizon) {
        if (proposals >= options.max_proposals) {
            std::ostringstream os;
            os << "proposal cap " << options.max_proposals << " reached before t=" << horizon
               << " (rate bound " << model.rate_bound << " too large?)";
            fail(ErrorKind::runaway_rate, os.str());
        }
        const double candidate = t + stream.next_proposal(model.rate_bound);
        const bool is_proposal = candidate <= horizon;
        const double end = is_proposal ? candidate : horizon;

        if (end > t) {
            const GridSegment seg = segment_grid(t, end, h);
            double prev = t;
            for (std::size_t k = 1; k <= seg.cells; ++k) {
                const double tk = seg.point(k);
                if (!(tk > prev) || (k < seg.cells && !(tk < end))) continue;
                const double dt = tk - prev;
                for (auto& dw : noise) dw = stream.wiener_increment(dt);
                const bool keep = k == seg.cells || (++interior % stride == 0);
                for (auto& lane : lanes) {
                    lane.integrator->advance(model, lane.y.span(), lane.v, dt, noise);
                    if (model.state_hint) {
                        if (!model.state_hint->contains(lane.y.span())) {
                            ++lane.traj.stats.excursions;
                            if (model.clamp_to_hint) model.state_hint->clamp(lane.y.span());
                        }
                    }
                    ++lane.traj.stats.cells;
                    if (keep) lane.traj.push_sample(tk, lane.y.span(), lane.v);
                }
                prev = tk;
            }
        }
        t = end;
        if (!is_proposal) break;

        ++proposals;
        const double u = stream.next_uniform(UniformKind::thinning);
        const double kernel_u = stream.next_uniform(UniformKind::kernel);
        const double update_u = stream.next_uniform(UniformKind::kernel);
        bool any = false;
        for (auto& lane : lanes) {
            lane.traj.record_proposal(t);
            ++lane.traj.stats.proposals;
            if (!accept_candidate(model, lane.y.span(), lane.v, u, &lane.traj.stats)) continue;
            const HybridState pre{lane.y, lane.v, t};
            const HybridState post = apply_jump(model, pre, kernel_u, update_u);
            if (!any) result.pre_jump_y = pre.y;
            lane.traj.record_jump({t, pre.y, post.y, pre.v, post.v});
            lane.y = post.y;
            lane.v = post.v;
            any = true;
        }
        if (stop_at_first_jump && any) {
            result.jumped = true;
            break;
        }
    }

    result.stop_time = t;
    result.trajectories.reserve(lanes.size());
    for (auto& lane : lanes) result.trajectories.push_back(std::move(lane.traj));
    return result;
}

}  // namespace

GridSegment segment_grid(double start, double end, double h) {
    if (!(h > 0.0)) fail(ErrorKind::argument, "grid step must be positive");
    if (!(end > start)) fail(ErrorKind::argument, "grid segment must have positive length");
    const double length = end - start;
    const double count = std::floor(length / h);
    GridSegment seg;
    seg.start = start;
    seg.end = end;
    seg.cells = count < 1.0 ? 1 : static_cast<std::size_t>(count);
    seg.local_step = length / static_cast<double>(seg.cells);
    return seg;
}

bool accept_candidate(const PDifMPModel& model, std::span<const double> y, ModeIndex v, double u,
                      PathStats* stats) {
    if (!(u >= 0.0 && u <= 1.0)) fail(ErrorKind::argument, "thinning uniform must lie in [0,1]");
    const double lambda = model.rate(y, v);
    if (stats) {
        stats->rate_min = std::min(stats->rate_min, lambda);
        stats->rate_max = std::max(stats->rate_max, lambda);
    }
    if (!(lambda >= 0.0)) {
        fail(ErrorKind::model_definition, "rate evaluated to a negative or NaN value");
    }
    if (lambda > model.rate_bound) {
        if (model.bound_policy == BoundPolicy::strict) {
            std::ostringstream os;
            os.precision(17);
            os << "rate " << lambda << " exceeds the thinning bound " << model.rate_bound << " at y=[";
            for (std::size_t i = 0; i < y.size(); ++i) os << (i ? "," : "") << y[i];
            os << "], v=" << v;
            fail(ErrorKind::bound_violation, os.str());
        }
        if (stats) ++stats->bound_violations;
    }
    return lambda > 0.0 && u * model.rate_bound <= lambda;
}

HybridState apply_jump(const PDifMPModel& model, const HybridState& pre, double kernel_uniform,
                       double update_uniform) {
    HybridState post = pre;
    post.v = sample_mode(model, pre, kernel_uniform);
    if (model.jump_update) {
        model.jump_update->apply(post.y.span(), pre.v, post.v, update_uniform);
        if (!post.y.all_finite()) {
            fail(ErrorKind::integration_diverged, "jump update produced a non-finite state at t=" +
                                                      std::to_string(pre.t));
        }
    }
    return post;
}

NextJump next_jump(const PDifMPModel& model, const FlowIntegrator& integrator, DriverStream& stream,
                   const HybridState& state, const SimulationOptions& options) {
    const FlowIntegrator* lanes[] = {&integrator};
    auto r = run(model, lanes, stream, options, state, true);
    NextJump out;
    out.jumped = r.jumped;
    out.time = r.stop_time;
    out.samples = std::move(r.trajectories.front());
    const HybridState last = out.samples.final_state();
    out.post = last;
    out.y = r.jumped ? r.pre_jump_y : last.y;
    return out;
}

Trajectory simulate_path(const PDifMPModel& model, const FlowIntegrator& integrator, DriverStream& stream,
                         const SimulationOptions& options) {
    const FlowIntegrator* lanes[] = {&integrator};
    return std::move(run(model, lanes, stream, options, model.initial_state(), false).trajectories.front());
}

std::vector<Trajectory> simulate_lanes(const PDifMPModel& model, std::span<const FlowIntegrator* const> lanes,
                                       DriverStream& stream, const SimulationOptions& options,
                                       std::optional<HybridState> start) {
    return run(model, lanes, stream, options, start.value_or(model.initial_state()), false).trajectories;
}

std::pair<Trajectory, Trajectory> simulate_coupled_pair(const PDifMPModel& model, const FlowIntegrator& first,
                                                        const FlowIntegrator& second, DriverStream& stream,
                                                        const SimulationOptions& options) {
    const FlowIntegrator* lanes[] = {&first, &second};
    auto r = run(model, lanes, stream, options, model.initial_state(), false);
    return {std::move(r.trajectories[0]), std::move(r.trajectories[1])};
}

}  // namespace pdifmp
