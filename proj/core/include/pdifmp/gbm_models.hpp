#pragma once

#include <memory>
#include <optional>
#include <variant>

#include "pdifmp/flows.hpp"
#include "pdifmp/model.hpp"

namespace pdifmp::gbm {

/// y' = y * e^eta with eta ~ Exp(rate).
struct ExpMagnitudeJump {
    double rate = 1e-4;
};

/// y' = factor * y.
struct ScaleJump {
    double factor = 0.9;
};

struct NoJumpUpdate {};

using JumpSpec = std::variant<ExpMagnitudeJump, ScaleJump, NoJumpUpdate>;

struct ConstantRate {
    double lambda = 1e-4;
};

/// lambda(y) = coefficient * max(y, 0).
struct LinearRate {
    double coefficient = 0.01;
};

using RateSpec = std::variant<ConstantRate, LinearRate>;

/// Geometric Brownian motion whose discrete mode counts the jumps taken.
struct Params {
    double mu = 0.001;
    double sigma = 0.002;
    double y0 = 50.0;
    double horizon = 1.0;
    JumpSpec jump = ExpMagnitudeJump{};
    RateSpec rate = ConstantRate{};
    /// Thinning bound; constant rates default to the rate itself.
    std::optional<double> rate_bound;
    /// Linear rates without an explicit bound use coefficient * y_max.
    double y_max = 500.0;
    std::size_t counter_capacity = 64;
    /// Count bound violations instead of failing (reproduces configurations
    /// whose stated bound lies below the rate).
    bool paper_faithful = false;
};

/// A model together with the closed-form flow of its continuous part.
struct ModelWithExactFlow {
    PDifMPModel model;
    std::shared_ptr<const FlowIntegrator> exact_flow;
};

void validate(const Params& p);

ModelWithExactFlow make_model(const Params& p);

/// Constant Poisson rate, exponential multiplicative jumps.
ModelWithExactFlow make_example1(const Params& p);
/// State-dependent rate 0.01 y with 0.9 y jumps.
ModelWithExactFlow make_example2(const Params& p);

Params example1_defaults();
Params example2_defaults();
/// GBM mu=0.05, sigma=0.2, y0=1, lambda=lambda*=1, jump y'=0.9y, T=1.
Params weak_test_defaults();

}  // namespace pdifmp::gbm
