#pragma once

#include <memory>
#include <span>
#include <string_view>

#include "pdifmp/glioma.hpp"
#include "pdifmp/model.hpp"

namespace pdifmp {

enum class FlowKind { exact_gbm, euler_maruyama, glioma_splitting };

std::string_view to_string(FlowKind kind) noexcept;

/// Advances the continuous component across one grid cell with the mode held
/// fixed. Implementations are stateless and safe to share between threads.
class FlowIntegrator {
 public:
    virtual ~FlowIntegrator() = default;
    virtual FlowKind kind() const noexcept = 0;
    /// `y` is updated in place; `dW` holds the cell's m Wiener increments.
    virtual void advance(const PDifMPModel& model, std::span<double> y, ModeIndex v, double dt,
                         std::span<const double> dW) const = 0;
};

/// One Euler-Maruyama step y + b(y,v) h + sigma(y,v) dW.
/// Throws integration_diverged if the result is not finite.
StateVector em_step(const PDifMPModel& model, std::span<const double> y, ModeIndex v, double h,
                    std::span<const double> dW);

/// Continuous interpolation inside the cell [t_i, t_i + h]:
/// y_i + b(y_i,v)(t - t_i) + sigma(y_i,v)(W_t - W_{t_i}).
StateVector em_interpolate(const PDifMPModel& model, std::span<const double> y_i, ModeIndex v, double t_i,
                           double h, double t, std::span<const double> dW_partial);

/// Closed-form geometric Brownian motion y0 exp((mu - sigma^2/2) t + sigma W_t).
double exact_gbm_flow(double y0, double mu, double sigma, double t, double W_t);

/// (e^xi - 1) / xi with its removable singularity filled in.
double phi1(double xi) noexcept;

enum class FreezePoint {
    post,  ///< A, A', f' evaluated at the x produced by the first subflow
    pre,   ///< ... at the cell's starting x
};

struct GliomaState {
    double x = 0.0;
    double z = 0.0;
    double v = 0.0;  ///< velocity value (not index)
};

/// One Lie-Trotter step: the x-subflows (noise then linear drift), then the
/// linear z-equation with x frozen, then the constant velocity.
GliomaState glioma_splitting_step(const GliomaState& s, const glioma::Params& params, double h, double dW,
                                  FreezePoint freeze = FreezePoint::post);

class EulerMaruyamaFlow final : public FlowIntegrator {
 public:
    FlowKind kind() const noexcept override { return FlowKind::euler_maruyama; }
    void advance(const PDifMPModel& model, std::span<double> y, ModeIndex v, double dt,
                 std::span<const double> dW) const override;
};

/// Exact GBM flow; valid only for models with drift mu*y and diffusion sigma*y.
class ExactGbmFlow final : public FlowIntegrator {
 public:
    ExactGbmFlow(double mu, double sigma) : mu_(mu), sigma_(sigma) {}
    FlowKind kind() const noexcept override { return FlowKind::exact_gbm; }
    void advance(const PDifMPModel& model, std::span<double> y, ModeIndex v, double dt,
                 std::span<const double> dW) const override;

 private:
    double mu_;
    double sigma_;
};

/// Splitting integrator for the glioma model (state (x, z), velocity mode).
class GliomaSplittingFlow final : public FlowIntegrator {
 public:
    explicit GliomaSplittingFlow(glioma::Params params, FreezePoint freeze = FreezePoint::post)
        : params_(std::move(params)), freeze_(freeze) {}
    FlowKind kind() const noexcept override { return FlowKind::glioma_splitting; }
    void advance(const PDifMPModel& model, std::span<double> y, ModeIndex v, double dt,
                 std::span<const double> dW) const override;

 private:
    glioma::Params params_;
    FreezePoint freeze_;
};

}  // namespace pdifmp
