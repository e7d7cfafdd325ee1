#include "pdifmp/gbm_models.hpp"

#include <cmath>
#include <sstream>

#include "pdifmp/error.hpp"

namespace pdifmp::gbm {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double default_bound(const Params& p) {
    if (p.rate_bound) return *p.rate_bound;
    return std::visit(overloaded{[](const ConstantRate& r) { return r.lambda > 0.0 ? r.lambda : 1.0; },
                                 [&](const LinearRate& r) { return r.coefficient * p.y_max; }},
                      p.rate);
}

}  // namespace

void validate(const Params& p) {
    const auto bad = [](const std::string& what) { fail(ErrorKind::config, "GBM parameters: " + what); };
    if (!std::isfinite(p.mu)) bad("mu must be finite");
    if (!(p.sigma >= 0.0) || !std::isfinite(p.sigma)) bad("sigma must be nonnegative");
    if (!(p.y0 > 0.0) || !std::isfinite(p.y0)) bad("y0 must be positive");
    if (!(p.horizon > 0.0) || !std::isfinite(p.horizon)) bad("horizon must be positive");
    if (p.counter_capacity < 2) bad("jump counter capacity must be at least 2");
    if (p.rate_bound && (!(*p.rate_bound > 0.0) || !std::isfinite(*p.rate_bound))) bad("rate bound must be positive");
    std::visit(overloaded{[&](const ExpMagnitudeJump& j) {
                              if (!(j.rate > 0.0)) bad("jump magnitude rate must be positive");
                          },
                          [&](const ScaleJump& j) {
                              if (!(j.factor > 0.0) || !std::isfinite(j.factor)) bad("jump scale must be positive");
                          },
                          [](const NoJumpUpdate&) {}},
               p.jump);
    std::visit(overloaded{[&](const ConstantRate& r) {
                              if (!(r.lambda >= 0.0) || !std::isfinite(r.lambda)) bad("jump rate must be nonnegative");
                              if (!p.paper_faithful && r.lambda > default_bound(p)) {
                                  bad("constant jump rate exceeds the thinning bound");
                              }
                          },
                          [&](const LinearRate& r) {
                              if (!(r.coefficient > 0.0)) bad("rate coefficient must be positive");
                              if (!(p.y_max > 0.0)) bad("y_max must be positive");
                          }},
               p.rate);
}

ModelWithExactFlow make_model(const Params& p) {
    validate(p);

    PDifMPModel model;
    model.id = "gbm";
    model.dim = 1;
    model.noise_dim = 1;
    model.modes = ModeSet::counter(p.counter_capacity);
    model.horizon = p.horizon;
    model.initial_y = StateVector{p.y0};
    model.initial_mode = 0;
    model.rate_bound = default_bound(p);
    model.bound_policy = p.paper_faithful ? BoundPolicy::count_only : BoundPolicy::strict;

    const double mu = p.mu;
    const double sigma = p.sigma;
    model.drift = [mu](std::span<const double> y, ModeIndex, std::span<double> out) { out[0] = mu * y[0]; };
    model.diffusion = [sigma](std::span<const double> y, ModeIndex, std::span<double> out) {
        out[0] = sigma * y[0];
    };
    model.rate = std::visit(
        overloaded{[](const ConstantRate& r) -> RateFn {
                       return [lambda = r.lambda](std::span<const double>, ModeIndex) { return lambda; };
                   },
                   [](const LinearRate& r) -> RateFn {
                       return [c = r.coefficient](std::span<const double> y, ModeIndex) {
                           return c * std::max(y[0], 0.0);
                       };
                   }},
        p.rate);

    const std::size_t capacity = p.counter_capacity;
    model.kernel = CumulativeKernel{[capacity](std::span<const double>, ModeIndex v, std::span<double> out) {
        if (v + 1 >= capacity) {
            fail(ErrorKind::model_definition,
                 "jump counter overflow: capacity " + std::to_string(capacity) + " reached");
        }
        for (std::size_t j = 0; j <= capacity; ++j) out[j] = j >= v + 2 ? 1.0 : 0.0;
    }};

    model.jump_update = std::visit(
        overloaded{[](const ExpMagnitudeJump& j) -> std::optional<JumpUpdate> {
                       return JumpUpdate{[rate = j.rate](std::span<double> y, ModeIndex, ModeIndex, double u) {
                           const double eta = -std::log1p(-u) / rate;
                           y[0] *= std::exp(eta);
                       }};
                   },
                   [](const ScaleJump& j) -> std::optional<JumpUpdate> {
                       return JumpUpdate{[factor = j.factor](std::span<double> y, ModeIndex, ModeIndex, double) {
                           y[0] *= factor;
                       }};
                   },
                   [](const NoJumpUpdate&) -> std::optional<JumpUpdate> { return std::nullopt; }},
        p.jump);

    return {std::move(model), std::make_shared<ExactGbmFlow>(mu, sigma)};
}

ModelWithExactFlow make_example1(const Params& p) {
    if (!std::holds_alternative<ExpMagnitudeJump>(p.jump) || !std::holds_alternative<ConstantRate>(p.rate)) {
        fail(ErrorKind::config, "example1 needs exponential jump magnitudes and a constant rate");
    }
    auto out = make_model(p);
    out.model.id = "example1";
    return out;
}

ModelWithExactFlow make_example2(const Params& p) {
    if (!std::holds_alternative<LinearRate>(p.rate)) {
        fail(ErrorKind::config, "example2 needs a linear (state-dependent) rate");
    }
    auto out = make_model(p);
    out.model.id = "example2";
    return out;
}

Params example1_defaults() {
    Params p;
    p.mu = 0.001;
    p.sigma = 0.002;
    p.y0 = 50.0;
    p.horizon = 1.0;
    p.jump = ExpMagnitudeJump{1e-4};
    p.rate = ConstantRate{1e-4};
    return p;
}

Params example2_defaults() {
    Params p;
    p.mu = 0.01;
    p.sigma = 0.2;
    p.y0 = 50.0;
    p.horizon = 1.0;
    p.jump = ScaleJump{0.9};
    p.rate = LinearRate{0.01};
    return p;
}

Params weak_test_defaults() {
    Params p;
    p.mu = 0.05;
    p.sigma = 0.2;
    p.y0 = 1.0;
    p.horizon = 1.0;
    p.jump = ScaleJump{0.9};
    p.rate = ConstantRate{1.0};
    p.rate_bound = 1.0;
    return p;
}

}  // namespace pdifmp::gbm
