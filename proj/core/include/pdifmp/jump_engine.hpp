#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "pdifmp/drivers.hpp"
#include "pdifmp/flows.hpp"
#include "pdifmp/model.hpp"
#include "pdifmp/trajectory.hpp"

namespace pdifmp {

inline constexpr std::size_t kDefaultProposalCap = 10'000'000;

/// Cells of one proposal-to-proposal interval [start, end]: the local step
/// (end - start) / floor((end - start) / h) so the last point lands on `end`
/// exactly; intervals shorter than h get a single cell.
struct GridSegment {
    double start = 0.0;
    double end = 0.0;
    std::size_t cells = 1;
    double local_step = 0.0;

    /// k-th grid point, k = 0..cells; point(cells) == end.
    double point(std::size_t k) const noexcept { return k == cells ? end : start + static_cast<double>(k) * local_step; }
};

GridSegment segment_grid(double start, double end, double h);

struct SimulationOptions {
    double step = 1e-2;
    /// Defaults to the model's horizon.
    std::optional<double> horizon;
    std::size_t max_proposals = kDefaultProposalCap;
    /// Keep every n-th interior grid point; proposal, jump and horizon points
    /// are always kept.
    std::size_t record_stride = 1;
};

/// Thinning test u * rate_bound <= rate(y, v). Rates above the bound raise a
/// bound_violation error under BoundPolicy::strict and are counted otherwise.
bool accept_candidate(const PDifMPModel& model, std::span<const double> y, ModeIndex v, double u,
                      PathStats* stats = nullptr);

/// Post-jump state: mode resampled with the kernel uniform, y passed through
/// the model's jump update (identity when absent), t unchanged.
HybridState apply_jump(const PDifMPModel& model, const HybridState& pre, double kernel_uniform,
                       double update_uniform = 0.5);

struct NextJump {
    bool jumped = false;      ///< false when the horizon was reached first
    double time = 0.0;        ///< T_{n+1}, or the horizon
    StateVector y;            ///< flow value at `time` (pre-jump)
    HybridState post;         ///< post-jump state (equals the pre-jump state at the horizon)
    Trajectory samples;       ///< grid samples consumed on the way
};

/// Advances from `state` through proposals until the first accepted one or
/// the horizon. Rejected proposals stay on the grid.
NextJump next_jump(const PDifMPModel& model, const FlowIntegrator& integrator, DriverStream& stream,
                   const HybridState& state, const SimulationOptions& options);

Trajectory simulate_path(const PDifMPModel& model, const FlowIntegrator& integrator, DriverStream& stream,
                         const SimulationOptions& options);

/// Runs several integrators in lockstep on one stream: every lane sees the
/// same proposals, uniforms and per-cell Wiener increments, so grids agree
/// and differences isolate the flow approximation.
std::vector<Trajectory> simulate_lanes(const PDifMPModel& model, std::span<const FlowIntegrator* const> lanes,
                                       DriverStream& stream, const SimulationOptions& options,
                                       std::optional<HybridState> start = std::nullopt);

std::pair<Trajectory, Trajectory> simulate_coupled_pair(const PDifMPModel& model, const FlowIntegrator& first,
                                                        const FlowIntegrator& second, DriverStream& stream,
                                                        const SimulationOptions& options);

}  // namespace pdifmp
