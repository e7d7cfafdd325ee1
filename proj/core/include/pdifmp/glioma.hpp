#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "pdifmp/model.hpp"

namespace pdifmp::glioma {

/// Microscale glioma cell model in 1D. State (x, z) with velocity mode v.
struct Params {
    double k_plus = 0.01;      ///< attachment rate [1/s]
    double k_minus = 0.01;     ///< detachment rate [1/s]
    double alpha = 0.21e-3;    ///< mean cell speed [mm/s]
    double lambda0 = 0.7;      ///< basal turning frequency [1/s]
    double lambda1 = 0.08;     ///< turning-rate modulation [1/s]
    double a = 0.5;            ///< chemoattractant strength
    double b = 0.2;            ///< chemorepellent strength
    std::optional<double> lambda_star;  ///< thinning bound; defaults to lambda0

    double x0 = 0.0;
    double z0 = 0.5;
    bool start_positive = true;  ///< initial velocity +alpha (else -alpha)
    double horizon = 360.0;

    /// Candidate speeds as multiples of alpha; the default is {-1, +1}.
    std::vector<double> speed_multiples{-1.0, 1.0};
    /// Scalar diffusivity D(x) entering the ODF weight; defaults to 1.
    std::function<double(double)> diffusivity;

    bool clamp_state = false;

    double thinning_bound() const noexcept { return lambda_star.value_or(lambda0); }
};

/// Throws config errors for invalid parameter sets.
void validate(const Params& p);

/// A(x): extracellular factor concentration, a logistic curve.
inline double sigmoid(double x) noexcept { return 1.0 / (1.0 + std::exp(-x)); }
double sigmoid_derivative(double x) noexcept;
/// f(A): steady-state fraction of bound integrins.
double bound_fraction(double A, double k_plus, double k_minus) noexcept;
double bound_fraction_derivative(double A, double k_plus, double k_minus) noexcept;

/// Turning rate lambda0 - lambda1 * z, with z read on its admissible range [0, 1].
double turning_rate(const Params& p, double z) noexcept;

/// ODF weight in 1D, proportional to D(x) / |v|^3.
double odf_weight(double diffusivity, double velocity) noexcept;

PDifMPModel make_model(const Params& p);

}  // namespace pdifmp::glioma
