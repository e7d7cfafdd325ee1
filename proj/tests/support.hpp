#pragma once

#include <cmath>
#include <vector>

#include "pdifmp/error.hpp"
#include "pdifmp/model.hpp"

namespace pdifmp::testing {

/// Two modes {-1, +1}, mandatory flip, constant rate. The flow is the linear
/// SDE dy = drift dy dt + vol dW with a mode-dependent drift sign.
inline PDifMPModel flip_model(double rate, double bound, double horizon, double drift = 0.0, double vol = 0.0) {
    PDifMPModel m;
    m.id = "flip";
    m.dim = 1;
    m.noise_dim = 1;
    m.modes = ModeSet({-1.0, 1.0});
    m.drift = [drift](std::span<const double>, ModeIndex v, std::span<double> out) {
        out[0] = v == 0 ? -drift : drift;
    };
    m.diffusion = [vol](std::span<const double>, ModeIndex, std::span<double> out) { out[0] = vol; };
    m.rate = [rate](std::span<const double>, ModeIndex) { return rate; };
    m.rate_bound = bound;
    m.kernel = CumulativeKernel{[](std::span<const double>, ModeIndex v, std::span<double> out) {
        out[0] = 0.0;
        out[1] = v == 0 ? 0.0 : 1.0;
        out[2] = 1.0;
    }};
    m.horizon = horizon;
    m.initial_y = StateVector{0.0};
    m.initial_mode = 0;
    return m;
}

/// Kernel from fixed per-mode weights with the current mode's weight removed
/// and the rest renormalized.
inline CumulativeKernel weighted_kernel(std::vector<double> weights) {
    return CumulativeKernel{[weights](std::span<const double>, ModeIndex v, std::span<double> out) {
        double total = 0.0;
        for (std::size_t j = 0; j < weights.size(); ++j) total += j == v ? 0.0 : weights[j];
        std::size_t last = 0;
        for (std::size_t j = 0; j < weights.size(); ++j) {
            if (j != v && weights[j] > 0.0) last = j;
        }
        double acc = 0.0;
        out[0] = 0.0;
        for (std::size_t j = 0; j < weights.size(); ++j) {
            acc += j == v ? 0.0 : weights[j] / total;
            // Pin the top at 1 from the last weighted mode on, so rounding
            // leaves no mass on trailing zero-weight modes.
            out[j + 1] = j >= last ? 1.0 : acc;
        }
    }};
}

inline double mean(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

inline double variance(const std::vector<double>& xs) {
    const double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size() - 1);
}

template <class Fn>
ErrorKind error_kind_of(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    throw std::logic_error("expected a pdifmp::Error");
}

}  // namespace pdifmp::testing
