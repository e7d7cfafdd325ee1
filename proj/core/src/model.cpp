#include "pdifmp/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pdifmp/error.hpp"

namespace pdifmp {
namespace {

struct KernelProblem {
    ValidationIssueKind kind;
    std::string message;
};

std::optional<KernelProblem> inspect_cumulative(std::span<const double> a, ModeIndex current) {
    if (a.size() < 2) {
        return KernelProblem{ValidationIssueKind::kernel_weights, "cumulative list needs |V|+1 >= 2 entries"};
    }
    if (a.front() != 0.0) {
        return KernelProblem{ValidationIssueKind::kernel_weights, "a_0 must be 0"};
    }
    for (std::size_t i = 1; i < a.size(); ++i) {
        if (!std::isfinite(a[i]) || a[i] < a[i - 1]) {
            std::ostringstream os;
            os << "cumulative weights not nondecreasing at index " << i;
            return KernelProblem{ValidationIssueKind::kernel_weights, os.str()};
        }
    }
    if (std::abs(a.back() - 1.0) > kWeightTolerance) {
        std::ostringstream os;
        os.precision(17);
        os << "cumulative weights end at " << a.back() << ", expected 1";
        return KernelProblem{ValidationIssueKind::kernel_weights, os.str()};
    }
    if (current + 1 >= a.size()) {
        return KernelProblem{ValidationIssueKind::kernel_weights, "current mode outside the kernel's mode range"};
    }
    const double self_mass = a[current + 1] - a[current];
    if (self_mass > kWeightTolerance) {
        std::ostringstream os;
        os << "kernel assigns mass " << self_mass << " to the pre-jump mode " << current;
        return KernelProblem{ValidationIssueKind::self_jump, os.str()};
    }
    return std::nullopt;
}

std::string describe(const HybridState& x) {
    std::ostringstream os;
    os.precision(17);
    os << "(t=" << x.t << ", y=[";
    for (std::size_t i = 0; i < x.y.size(); ++i) os << (i ? "," : "") << x.y[i];
    os << "], v=" << x.v << ")";
    return os.str();
}

}  // namespace

bool StateBounds::contains(std::span<const double> y) const noexcept {
    for (std::size_t i = 0; i < per_component.size() && i < y.size(); ++i) {
        if (y[i] < per_component[i].first || y[i] > per_component[i].second) return false;
    }
    return true;
}

void StateBounds::clamp(std::span<double> y) const noexcept {
    for (std::size_t i = 0; i < per_component.size() && i < y.size(); ++i) {
        y[i] = std::clamp(y[i], per_component[i].first, per_component[i].second);
    }
}

void check_model_shape(const PDifMPModel& model) {
    const auto bad = [&](const std::string& what) {
        fail(ErrorKind::model_definition, "model '" + model.id + "': " + what);
    };
    if (model.dim == 0 || model.dim > kMaxStateDim) bad("dimension out of range");
    if (model.noise_dim == 0 || model.noise_dim > kMaxStateDim) bad("noise dimension out of range");
    if (!model.drift || !model.diffusion || !model.rate) bad("drift, diffusion and rate must be set");
    if (!(model.rate_bound > 0.0) || !std::isfinite(model.rate_bound)) bad("rate bound must be positive and finite");
    if (!(model.horizon > 0.0) || !std::isfinite(model.horizon)) bad("horizon must be positive and finite");
    if (model.initial_y.size() != model.dim) bad("initial state has wrong dimension");
    if (!model.initial_y.all_finite()) bad("initial state is not finite");
    if (!model.modes.contains(model.initial_mode)) bad("initial mode outside the mode set");
    const bool has_kernel = std::visit(
        [](const auto& k) {
            if constexpr (std::is_same_v<std::decay_t<decltype(k)>, CumulativeKernel>) {
                return static_cast<bool>(k.weights);
            } else {
                return static_cast<bool>(k.sample);
            }
        },
        model.kernel);
    if (!has_kernel) bad("kernel is not set");
    if (model.state_hint && model.state_hint->per_component.size() != model.dim) {
        bad("state hint must give bounds for every component");
    }
}

void check_cumulative(std::span<const double> a, ModeIndex current) {
    if (auto problem = inspect_cumulative(a, current)) fail(ErrorKind::model_definition, problem->message);
}

std::vector<double> cumulative_weights(const CumulativeKernel& kernel, const PDifMPModel& model,
                                       const HybridState& x) {
    std::vector<double> a(model.modes.size() + 1, 0.0);
    kernel.weights(x.y.span(), x.v, a);
    check_cumulative(a, x.v);
    return a;
}

ModeIndex sample_mode(const PDifMPModel& model, const HybridState& x, double u) {
    if (!(u >= 0.0 && u <= 1.0)) {
        fail(ErrorKind::argument, "kernel uniform must lie in [0,1]");
    }
    if (const auto* sampler = std::get_if<SamplerKernel>(&model.kernel)) {
        const ModeIndex next = sampler->sample(u, x);
        if (!model.modes.contains(next)) fail(ErrorKind::model_definition, "kernel sampler returned an unknown mode");
        if (next == x.v) fail(ErrorKind::model_definition, "kernel sampler returned the pre-jump mode");
        return next;
    }
    const auto a = cumulative_weights(std::get<CumulativeKernel>(model.kernel), model, x);
    const std::size_t count = a.size() - 1;
    // Bins with no mass (the current mode's in particular) are never selected.
    const auto eligible = [&](std::size_t i) { return i != x.v && a[i + 1] - a[i] > 0.0; };

    std::size_t chosen = count;
    if (u == 0.0) {
        for (std::size_t i = 0; i < count; ++i) {
            if (eligible(i)) { chosen = i; break; }
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            if (eligible(i) && a[i] < u && u <= a[i + 1]) { chosen = i; break; }
        }
        if (chosen == count) {
            // u lands beyond a_|V| (rounding) or inside a zero-tolerance self bin:
            // take the nearest eligible bin at or after u, else the last one.
            for (std::size_t i = 0; i < count; ++i) {
                if (eligible(i) && u <= a[i + 1]) { chosen = i; break; }
            }
            if (chosen == count) {
                for (std::size_t i = count; i-- > 0;) {
                    if (eligible(i)) { chosen = i; break; }
                }
            }
        }
    }
    if (chosen == count) fail(ErrorKind::model_definition, "kernel has no eligible target mode");
    return static_cast<ModeIndex>(chosen);
}

ValidationReport validate_model(const PDifMPModel& model, std::span<const HybridState> probes) {
    if (probes.empty()) fail(ErrorKind::argument, "validate_model needs at least one probe state");
    ValidationReport report;
    for (const auto& x : probes) {
        ++report.probes_checked;
        if (x.y.size() != model.dim || !x.y.all_finite() || !model.modes.contains(x.v)) {
            report.issues.push_back({ValidationIssueKind::invalid_state, x, "invalid probe state " + describe(x)});
            continue;
        }
        const double lambda = model.rate(x.y.span(), x.v);
        if (lambda < 0.0) {
            report.issues.push_back({ValidationIssueKind::negative_rate, x,
                                     "negative rate " + std::to_string(lambda) + " at " + describe(x)});
        } else if (lambda > model.rate_bound) {
            std::ostringstream os;
            os << "rate " << lambda << " exceeds bound " << model.rate_bound << " at " << describe(x);
            report.issues.push_back({ValidationIssueKind::rate_bound, x, os.str()});
        }
        if (const auto* cumulative = std::get_if<CumulativeKernel>(&model.kernel)) {
            std::vector<double> a(model.modes.size() + 1, 0.0);
            cumulative->weights(x.y.span(), x.v, a);
            if (auto problem = inspect_cumulative(a, x.v)) {
                report.issues.push_back({problem->kind, x, problem->message + " at " + describe(x)});
            }
        } else {
            for (double u : {1e-3, 0.25, 0.5, 0.75, 1.0}) {
                const ModeIndex next = std::get<SamplerKernel>(model.kernel).sample(u, x);
                if (!model.modes.contains(next)) {
                    report.issues.push_back({ValidationIssueKind::kernel_weights, x,
                                             "sampler returned an unknown mode at " + describe(x)});
                    break;
                }
                if (next == x.v) {
                    report.issues.push_back({ValidationIssueKind::self_jump, x,
                                             "sampler returned the pre-jump mode at " + describe(x)});
                    break;
                }
            }
        }
    }
    return report;
}

std::string_view to_string(ValidationIssueKind kind) noexcept {
    switch (kind) {
        case ValidationIssueKind::rate_bound: return "rate_bound";
        case ValidationIssueKind::negative_rate: return "negative_rate";
        case ValidationIssueKind::kernel_weights: return "kernel_weights";
        case ValidationIssueKind::self_jump: return "self_jump";
        case ValidationIssueKind::invalid_state: return "invalid_state";
    }
    return "unknown";
}

}  // namespace pdifmp
