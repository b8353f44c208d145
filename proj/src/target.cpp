#include "ergosense/target.hpp"

#include <algorithm>
#include <stdexcept>

namespace ergosense {

namespace {

TargetDistribution normalized(std::vector<double> density, const GridSpec& grid, const ModeSet& modes) {
    double sum = 0.0;
    for (double v : density) sum += v;
    const double scale = 1.0 / (sum * grid.cell_volume());
    for (double& v : density) v *= scale;
    TargetDistribution t;
    t.grid = grid;
    t.coeffs = distribution_coeffs(density, grid, modes);
    t.density = std::move(density);
    return t;
}

}  // namespace

TargetDistribution uniform_target(const GridSpec& grid, const ModeSet& modes) {
    return normalized(std::vector<double>(grid.size(), 1.0), grid, modes);
}

TargetDistribution target_from_weights(std::vector<double> weights, double epsilon, const GridSpec& grid,
                                       const ModeSet& modes) {
    if (weights.size() != grid.size()) throw std::invalid_argument("target weights do not match the grid");
    if (!(epsilon > 0.0)) throw std::invalid_argument("target floor epsilon must be positive");
    double max_w = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw std::invalid_argument("target weights must be non-negative");
        max_w = std::max(max_w, w);
    }
    if (max_w <= 0.0) return uniform_target(grid, modes);
    const double floor = epsilon * max_w;
    for (double& w : weights) w = std::max(w, floor);
    return normalized(std::move(weights), grid, modes);
}

std::vector<double> posterior_grid(const KernelModel& model, const PlattCalibration& calib, const GridSpec& grid) {
    std::vector<double> p = decision_grid(model, grid);
    for (double& v : p) v = platt_probability(v, calib);
    return p;
}

TargetDistribution build_target(const KernelModel& model, const PlattCalibration& calib, const GridSpec& grid,
                                double epsilon, const ModeSet& modes) {
    return target_from_weights(posterior_grid(model, calib, grid), epsilon, grid, modes);
}

TargetDistribution build_gp_target(const GpModel& model, const GridSpec& grid, double epsilon,
                                   const ModeSet& modes) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("target floor epsilon must be positive");
    std::vector<double> var = model.variance_grid(grid);
    double max_v = 0.0;
    for (double v : var) max_v = std::max(max_v, v);
    if (max_v <= 0.0) return uniform_target(grid, modes);
    for (double& v : var) v += epsilon * max_v;
    return normalized(std::move(var), grid, modes);
}

}  // namespace ergosense
