#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "ergosense/dataset.hpp"
#include "ergosense/grid.hpp"

namespace ergosense {

// exp(-|a - b|^2 / sigma^2). Throws std::invalid_argument for sigma <= 0.
double rbf_kernel(const Vec& a, const Vec& b, double sigma);

// Soft-margin RBF classifier. Collision labels (y = 1) map to +1 and free space
// to -1; the stored decision function is sign-flipped so that it is negative on
// the collision side:  phi(x) = -sum_k alpha_k label_k K(x_k, x) + bias.
struct KernelModel {
    std::vector<Vec> support_points;
    std::vector<double> alphas;
    std::vector<int> labels;
    double bias = 0.0;
    double sigma = 0.08;
    double C = 10.0;
    double dual_objective = 0.0;  // 1/2 a^T Q a - sum a, over the whole training set
    std::size_t iterations = 0;
};

struct SmoOptions {
    double tolerance = 1e-3;             // maximal KKT violation at termination
    std::size_t max_iterations = 0;      // 0 = max(10^7, 100 N)
};

// Dual solution over all training points, in the caller's order.
struct DualSolution {
    std::vector<double> alphas;
    double rho = 0.0;  // libsvm-style offset: f(x) = sum a y K - rho
    double objective = 0.0;
    std::size_t iterations = 0;
};

// SMO with second-order working-set selection on a precomputed kernel matrix.
// `labels` are +1/-1. `warm_start` (optional) must be dual-feasible.
DualSolution solve_svm_dual(const Eigen::MatrixXd& kernel, std::span<const int> labels, double C,
                            const SmoOptions& options = {}, const std::vector<double>* warm_start = nullptr);

Eigen::MatrixXd kernel_matrix(std::span<const Vec> points, double sigma);

// Throws NotFittable when the data holds a single class (or is empty).
// Training points are put in a canonical order first, so the fit does not
// depend on the order of `data`. When `training_decisions` is given it receives
// the decision value of every training point, in the order of `data`.
KernelModel fit_kernel_model(const Dataset& data, double sigma, double C, const SmoOptions& options = {},
                             std::vector<double>* training_decisions = nullptr);

double decision_value(const KernelModel& model, const Vec& x);

// Decision values at every cell centre, using the separable form of the kernel.
std::vector<double> decision_grid(const KernelModel& model, const GridSpec& grid);

// Sorted training order used by fit_kernel_model.
std::vector<std::size_t> canonical_order(const Dataset& data);

}  // namespace ergosense
