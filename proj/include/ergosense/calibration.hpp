#pragma once

#include <span>

#include "ergosense/dataset.hpp"
#include "ergosense/kernel_model.hpp"

namespace ergosense {

// P(y = 1 | x) = 1 / (1 + exp(A phi(x) + B)).
struct PlattCalibration {
    double A = 1.0;
    double B = 0.0;
    int iterations = 0;
};

// Regularized maximum-likelihood sigmoid fit with smoothed targets
// t+ = (N+ + 1)/(N+ + 2), t- = 1/(N- + 2), damped Newton to |grad| < 1e-8.
// Throws NotFittable for single-class input, CalibrationError when Newton fails
// to converge within 100 iterations.
PlattCalibration fit_platt(std::span<const double> decision_values, std::span<const int> labels);
PlattCalibration fit_platt(const KernelModel& model, const Dataset& data);

// Numerically stable sigmoid.
double platt_probability(double decision, const PlattCalibration& calib);

double posterior(const KernelModel& model, const PlattCalibration& calib, const Vec& x);

}  // namespace ergosense
