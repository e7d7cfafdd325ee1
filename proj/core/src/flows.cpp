#include "pdifmp/flows.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "pdifmp/error.hpp"

namespace pdifmp {
namespace {

[[noreturn]] void diverged(std::string_view scheme, double h, std::span<const double> y) {
    std::ostringstream os;
    os.precision(17);
    os << scheme << " produced a non-finite state (step h=" << h << ", state=[";
    for (std::size_t i = 0; i < y.size(); ++i) os << (i ? "," : "") << y[i];
    os << "])";
    fail(ErrorKind::integration_diverged, os.str());
}

bool finite(std::span<const double> y) noexcept {
    for (double v : y) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

// y += b(y0) dt + sigma(y0) dW, coefficients frozen at the cell's start.
void em_update(const PDifMPModel& model, std::span<const double> y0, ModeIndex v, double dt,
               std::span<const double> dW, std::span<double> out) {
    const std::size_t d = model.dim;
    const std::size_t m = model.noise_dim;
    std::array<double, kMaxStateDim> drift{};
    std::array<double, kMaxStateDim * kMaxStateDim> sigma{};
    model.drift(y0, v, std::span<double>(drift.data(), d));
    model.diffusion(y0, v, std::span<double>(sigma.data(), d * m));
    for (std::size_t i = 0; i < d; ++i) {
        double acc = y0[i] + drift[i] * dt;
        for (std::size_t j = 0; j < m; ++j) acc += sigma[i * m + j] * dW[j];
        out[i] = acc;
    }
}

}  // namespace

std::string_view to_string(FlowKind kind) noexcept {
    switch (kind) {
        case FlowKind::exact_gbm: return "exact_gbm";
        case FlowKind::euler_maruyama: return "euler_maruyama";
        case FlowKind::glioma_splitting: return "glioma_splitting";
    }
    return "unknown";
}

StateVector em_step(const PDifMPModel& model, std::span<const double> y, ModeIndex v, double h,
                    std::span<const double> dW) {
    if (!(h > 0.0)) fail(ErrorKind::argument, "em_step needs h > 0");
    if (y.size() != model.dim || dW.size() != model.noise_dim) {
        fail(ErrorKind::argument, "em_step: state or noise dimension mismatch");
    }
    StateVector out(model.dim);
    em_update(model, y, v, h, dW, out.span());
    if (!out.all_finite()) diverged("Euler-Maruyama", h, out.span());
    return out;
}

StateVector em_interpolate(const PDifMPModel& model, std::span<const double> y_i, ModeIndex v, double t_i,
                           double h, double t, std::span<const double> dW_partial) {
    if (!(h > 0.0) || t < t_i || t > t_i + h) {
        fail(ErrorKind::argument, "em_interpolate: t must lie in the cell [t_i, t_i + h]");
    }
    if (y_i.size() != model.dim || dW_partial.size() != model.noise_dim) {
        fail(ErrorKind::argument, "em_interpolate: state or noise dimension mismatch");
    }
    StateVector out(model.dim);
    // (t_i + h) - t_i need not round to h; the right endpoint must reproduce em_step.
    const double dt = t == t_i + h ? h : t - t_i;
    em_update(model, y_i, v, dt, dW_partial, out.span());
    if (!out.all_finite()) diverged("Euler-Maruyama interpolation", h, out.span());
    return out;
}

double exact_gbm_flow(double y0, double mu, double sigma, double t, double W_t) {
    if (t < 0.0) fail(ErrorKind::argument, "exact_gbm_flow needs t >= 0");
    return y0 * std::exp((mu - 0.5 * sigma * sigma) * t + sigma * W_t);
}

double phi1(double xi) noexcept {
    if (std::abs(xi) > 1e-5) return std::expm1(xi) / xi;
    return 1.0 + xi * (1.0 / 2.0 + xi * (1.0 / 6.0 + xi * (1.0 / 24.0 + xi * (1.0 / 120.0))));
}

GliomaState glioma_splitting_step(const GliomaState& s, const glioma::Params& params, double h, double dW,
                                  FreezePoint freeze) {
    if (!(h > 0.0)) fail(ErrorKind::argument, "glioma_splitting_step needs h > 0");
    // x-subflows with z frozen: linear drift (a - b) z x + v, then the
    // multiplicative noise whose exact solution is x exp(z dW).
    const double growth = h * (params.a - params.b) * s.z;
    const double x_drift = std::exp(growth) * s.x + phi1(growth) * h * s.v;
    const double x_new = std::exp(s.z * dW) * x_drift;

    // z-equation with x frozen.
    const double x_frozen = freeze == FreezePoint::post ? x_new : s.x;
    const double A = glioma::sigmoid(x_frozen);
    const double decay = params.k_plus * A + params.k_minus;
    const double source = glioma::bound_fraction_derivative(A, params.k_plus, params.k_minus) * s.v *
                          glioma::sigmoid_derivative(x_frozen);
    const double z_new = std::exp(-h * decay) * s.z + phi1(-h * decay) * h * source;

    GliomaState out{x_new, z_new, s.v};
    if (!std::isfinite(out.x) || !std::isfinite(out.z)) {
        const double state[] = {out.x, out.z};
        diverged("glioma splitting", h, state);
    }
    return out;
}

void EulerMaruyamaFlow::advance(const PDifMPModel& model, std::span<double> y, ModeIndex v, double dt,
                                std::span<const double> dW) const {
    std::array<double, kMaxStateDim> start{};
    std::copy(y.begin(), y.end(), start.begin());
    em_update(model, std::span<const double>(start.data(), y.size()), v, dt, dW, y);
    if (!finite(y)) diverged("Euler-Maruyama", dt, y);
}

void ExactGbmFlow::advance(const PDifMPModel&, std::span<double> y, ModeIndex, double dt,
                           std::span<const double> dW) const {
    y[0] = exact_gbm_flow(y[0], mu_, sigma_, dt, dW[0]);
    if (!std::isfinite(y[0])) diverged("exact GBM flow", dt, y);
}

void GliomaSplittingFlow::advance(const PDifMPModel& model, std::span<double> y, ModeIndex v, double dt,
                                  std::span<const double> dW) const {
    const auto next = glioma_splitting_step({y[0], y[1], model.modes.value(v)}, params_, dt, dW[0], freeze_);
    y[0] = next.x;
    y[1] = next.z;
}

}  // namespace pdifmp
