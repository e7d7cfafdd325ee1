#include "pdifmp/glioma.hpp"

#include <algorithm>
#include <sstream>

#include "pdifmp/error.hpp"

namespace pdifmp::glioma {

double sigmoid_derivative(double x) noexcept {
    // e^{-x} / (1 + e^{-x})^2 written as A (1 - A) to stay finite for large |x|.
    const double s = sigmoid(x);
    return s * (1.0 - s);
}

double bound_fraction(double A, double k_plus, double k_minus) noexcept {
    return k_plus * A / (k_plus * A + k_minus);
}

double bound_fraction_derivative(double A, double k_plus, double k_minus) noexcept {
    const double denom = k_plus * A + k_minus;
    return k_plus * k_minus / (denom * denom);
}

double turning_rate(const Params& p, double z) noexcept {
    return p.lambda0 - p.lambda1 * std::clamp(z, 0.0, 1.0);
}

double odf_weight(double diffusivity, double velocity) noexcept {
    const double speed = std::abs(velocity);
    return diffusivity / (speed * speed * speed);
}

void validate(const Params& p) {
    const auto bad = [](const std::string& what) { fail(ErrorKind::config, "glioma parameters: " + what); };
    for (double rate : {p.k_plus, p.k_minus, p.lambda0, p.lambda1}) {
        if (!(rate >= 0.0) || !std::isfinite(rate)) bad("rates must be finite and nonnegative");
    }
    if (!(p.k_plus * 0.5 + p.k_minus > 0.0)) bad("k_plus and k_minus cannot both be zero");
    if (!(p.alpha > 0.0)) bad("alpha (mean speed) must be positive");
    if (!(p.a >= 0.0) || !(p.b >= 0.0)) bad("a and b must be nonnegative");
    if (p.lambda1 > p.lambda0) bad("lambda1 must not exceed lambda0, otherwise the turning rate turns negative");
    if (!(p.lambda0 > 0.0)) bad("lambda0 must be positive");
    if (p.lambda_star && *p.lambda_star < p.lambda0) {
        std::ostringstream os;
        os << "lambda_star = " << *p.lambda_star << " is below lambda0 = " << p.lambda0
           << "; the turning rate reaches lambda0 at z = 0, so thinning needs lambda_star >= lambda0"
           << " (omit lambda_star to use lambda0)";
        bad(os.str());
    }
    if (!(p.horizon > 0.0)) bad("horizon must be positive");
    if (p.speed_multiples.size() < 2) bad("at least two candidate velocities are needed");
    for (double m : p.speed_multiples) {
        if (m == 0.0 || !std::isfinite(m)) bad("candidate velocities must be nonzero");
    }
    if (!(p.x0 >= -1.0 && p.x0 <= 1.0) || !(p.z0 >= 0.0 && p.z0 <= 1.0)) {
        bad("initial state must lie in [-1,1] x [0,1]");
    }
}

PDifMPModel make_model(const Params& p) {
    validate(p);

    std::vector<double> velocities;
    std::vector<std::string> labels;
    for (double m : p.speed_multiples) {
        velocities.push_back(m * p.alpha);
        std::ostringstream os;
        os << m << "*alpha";
        labels.push_back(os.str());
    }

    PDifMPModel model;
    model.id = "glioma";
    model.dim = 2;
    model.noise_dim = 1;
    model.modes = ModeSet(velocities, labels);
    model.rate_bound = p.thinning_bound();
    model.horizon = p.horizon;
    model.initial_y = StateVector{p.x0, p.z0};
    const auto positive = std::find_if(velocities.begin(), velocities.end(), [](double v) { return v > 0.0; });
    const auto negative = std::find_if(velocities.begin(), velocities.end(), [](double v) { return v < 0.0; });
    const auto start = p.start_positive ? positive : negative;
    model.initial_mode = static_cast<ModeIndex>(std::distance(velocities.begin(),
                                                              start != velocities.end() ? start : velocities.begin()));

    const double kp = p.k_plus;
    const double km = p.k_minus;
    const double a = p.a;
    const double b = p.b;
    model.drift = [=](std::span<const double> y, ModeIndex v, std::span<double> out) {
        const double x = y[0];
        const double z = y[1];
        const double vel = velocities[v];
        const double A = sigmoid(x);
        out[0] = 0.5 * z * z * x - b * z * x + a * z * x + vel;
        out[1] = -(kp * A + km) * z + bound_fraction_derivative(A, kp, km) * vel * sigmoid_derivative(x);
    };
    model.diffusion = [](std::span<const double> y, ModeIndex, std::span<double> out) {
        out[0] = y[1] * y[0];
        out[1] = 0.0;
    };
    model.rate = [p](std::span<const double> y, ModeIndex) { return turning_rate(p, y[1]); };

    auto diffusivity = p.diffusivity ? p.diffusivity : std::function<double(double)>([](double) { return 1.0; });
    model.kernel = CumulativeKernel{[velocities, diffusivity](std::span<const double> y, ModeIndex v,
                                                              std::span<double> out) {
        const double D = diffusivity(y[0]);
        double total = 0.0;
        for (std::size_t j = 0; j < velocities.size(); ++j) {
            if (j != v) total += odf_weight(D, velocities[j]);
        }
        out[0] = 0.0;
        double acc = 0.0;
        for (std::size_t j = 0; j < velocities.size(); ++j) {
            if (j != v) acc += odf_weight(D, velocities[j]) / total;
            out[j + 1] = acc;
        }
        // Pin the last entry: the renormalized sum is 1 up to rounding.
        out[velocities.size()] = 1.0;
    }};

    model.state_hint = StateBounds{{{-1.0, 1.0}, {0.0, 1.0}}};
    model.clamp_to_hint = p.clamp_state;
    return model;
}

}  // namespace pdifmp::glioma
