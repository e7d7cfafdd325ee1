#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pdifmp/state.hpp"

namespace pdifmp {

inline constexpr double kWeightTolerance = 1e-12;

using DriftFn = std::function<void(std::span<const double> y, ModeIndex v, std::span<double> out)>;
/// Writes the d x m diffusion matrix row-major into `out`.
using DiffusionFn = std::function<void(std::span<const double> y, ModeIndex v, std::span<double> out)>;
using RateFn = std::function<double(std::span<const double> y, ModeIndex v)>;

/// Kernel given by its cumulative weights a_0 = 0 <= a_1 <= ... <= a_|V| = 1
/// over the target modes; `out` has |V| + 1 entries.
struct CumulativeKernel {
    std::function<void(std::span<const double> y, ModeIndex v, std::span<double> out)> weights;
};

/// Kernel given only procedurally, as the generalised inverse u -> mode.
struct SamplerKernel {
    std::function<ModeIndex(double u, const HybridState& x)> sample;
};

using Kernel = std::variant<CumulativeKernel, SamplerKernel>;

/// Optional transform of the continuous state at an accepted jump. Receives
/// one extra uniform from the kernel substream. The identity (no hook) keeps
/// y continuous across jumps.
struct JumpUpdate {
    std::function<void(std::span<double> y, ModeIndex from, ModeIndex to, double u)> apply;
};

enum class BoundPolicy {
    strict,        ///< rate > rate_bound is a hard error
    count_only,    ///< violations are counted and the proposal is accepted
};

struct StateBounds {
    std::vector<std::pair<double, double>> per_component;

    bool contains(std::span<const double> y) const noexcept;
    void clamp(std::span<double> y) const noexcept;
};

/// Characteristic triple of a piecewise diffusion Markov process, plus the
/// data needed to start and bound a simulation.
struct PDifMPModel {
    std::string id;
    std::size_t dim = 1;
    std::size_t noise_dim = 1;
    ModeSet modes{std::vector<double>{0.0}};

    DriftFn drift;
    DiffusionFn diffusion;
    RateFn rate;
    double rate_bound = 1.0;
    Kernel kernel;
    std::optional<JumpUpdate> jump_update;

    double horizon = 1.0;
    StateVector initial_y;
    ModeIndex initial_mode = 0;

    BoundPolicy bound_policy = BoundPolicy::strict;
    std::optional<StateBounds> state_hint;
    bool clamp_to_hint = false;

    HybridState initial_state() const { return {initial_y, initial_mode, 0.0}; }
};

/// Checks the shape of the model (dimensions, callables, bound, horizon).
/// Throws model_definition errors.
void check_model_shape(const PDifMPModel& model);

std::vector<double> cumulative_weights(const CumulativeKernel& kernel, const PDifMPModel& model,
                                       const HybridState& x);

/// Validates a cumulative list in place: a_0 = 0, nondecreasing, ends at 1,
/// zero increment for `current`. Throws model_definition errors.
void check_cumulative(std::span<const double> a, ModeIndex current);

/// Generalised inverse of the kernel: the unique i with a_{i-1} < u <= a_i.
/// u = 0 maps to the first mode with positive increment.
ModeIndex sample_mode(const PDifMPModel& model, const HybridState& x, double u);

enum class ValidationIssueKind { rate_bound, negative_rate, kernel_weights, self_jump, invalid_state };

struct ValidationIssue {
    ValidationIssueKind kind;
    HybridState state;
    std::string message;
};

struct ValidationReport {
    std::size_t probes_checked = 0;
    std::vector<ValidationIssue> issues;

    bool passed() const noexcept { return issues.empty(); }
};

/// Report-style check of the standing assumptions at each probe state.
ValidationReport validate_model(const PDifMPModel& model, std::span<const HybridState> probes);

std::string_view to_string(ValidationIssueKind kind) noexcept;

}  // namespace pdifmp
