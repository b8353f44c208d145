#pragma once

#include <vector>

#include "ergosense/calibration.hpp"
#include "ergosense/ergodic.hpp"
#include "ergosense/gaussian_process.hpp"
#include "ergosense/grid.hpp"

namespace ergosense {

// Normalized density on a grid (cell-sum x cell-volume = 1) with its Fourier coefficients.
struct TargetDistribution {
    GridSpec grid;
    std::vector<double> density;
    DistributionCoeffs coeffs;
};

TargetDistribution uniform_target(const GridSpec& grid, const ModeSet& modes);

// density proportional to max(w, epsilon * max w); uniform if every weight is zero.
TargetDistribution target_from_weights(std::vector<double> weights, double epsilon, const GridSpec& grid,
                                       const ModeSet& modes);

// Collision-likelihood target from a calibrated classifier.
TargetDistribution build_target(const KernelModel& model, const PlattCalibration& calib, const GridSpec& grid,
                                double epsilon, const ModeSet& modes);

// Uncertainty target: density proportional to variance + epsilon * max variance.
TargetDistribution build_gp_target(const GpModel& model, const GridSpec& grid, double epsilon,
                                   const ModeSet& modes);

std::vector<double> posterior_grid(const KernelModel& model, const PlattCalibration& calib, const GridSpec& grid);

}  // namespace ergosense
