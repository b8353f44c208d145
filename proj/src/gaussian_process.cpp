#include "ergosense/gaussian_process.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ergosense/errors.hpp"
#include "ergosense/kernel_model.hpp"

namespace ergosense {

GpModel fit_gp(const Dataset& data, double sigma, double noise) {
    if (data.empty()) throw std::invalid_argument("fit_gp: need at least one data point");
    if (!(noise > 0.0)) throw std::invalid_argument("fit_gp: noise must be positive");
    if (!(sigma > 0.0)) throw std::invalid_argument("fit_gp: sigma must be positive");

    GpModel model;
    model.sigma_ = sigma;
    model.noise_ = noise;
    // Same canonical order as the classifier so refits are order independent.
    const auto order = canonical_order(data);
    Eigen::VectorXd y(static_cast<Eigen::Index>(data.size()));
    for (std::size_t i = 0; i < order.size(); ++i) {
        model.points_.push_back(data[order[i]].location);
        y(static_cast<Eigen::Index>(i)) = data[order[i]].label == 1 ? 1.0 : -1.0;
    }
    const Eigen::MatrixXd k = kernel_matrix(model.points_, sigma);

    for (double jitter = 0.0; jitter <= 1e-4 * (1.0 + 1e-9); jitter = jitter == 0.0 ? 1e-10 : jitter * 10.0) {
        Eigen::MatrixXd a = k;
        a.diagonal().array() += noise + jitter;
        model.factor_.compute(a);
        if (model.factor_.info() == Eigen::Success) {
            model.jitter_ = jitter;
            model.weights_ = model.factor_.solve(y);
            return model;
        }
    }
    throw EstimatorError("gp kernel matrix is not positive definite");
}

Eigen::VectorXd GpModel::kernel_column(const Vec& x) const {
    Eigen::VectorXd ks(static_cast<Eigen::Index>(points_.size()));
    const double inv = 1.0 / (sigma_ * sigma_);
    for (std::size_t i = 0; i < points_.size(); ++i) {
        ks(static_cast<Eigen::Index>(i)) = std::exp(-(points_[i] - x).squaredNorm() * inv);
    }
    return ks;
}

double GpModel::mean(const Vec& x) const { return kernel_column(x).dot(weights_); }

double GpModel::variance(const Vec& x) const {
    const Eigen::VectorXd ks = kernel_column(x);
    const Eigen::VectorXd v = factor_.matrixL().solve(ks);
    return std::clamp(1.0 - v.squaredNorm(), 0.0, 1.0);
}

std::vector<double> GpModel::mean_grid(const GridSpec& grid) const {
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = mean(grid.cell_center(i));
    return out;
}

std::vector<double> GpModel::variance_grid(const GridSpec& grid) const {
    // Batched triangular solve over all cell centres.
    const auto n = static_cast<Eigen::Index>(points_.size());
    const auto m = static_cast<Eigen::Index>(grid.size());
    std::vector<double> out(grid.size());
    const Eigen::Index block = 1024;
    for (Eigen::Index start = 0; start < m; start += block) {
        const Eigen::Index cols = std::min(block, m - start);
        Eigen::MatrixXd ks(n, cols);
        for (Eigen::Index c = 0; c < cols; ++c) ks.col(c) = kernel_column(grid.cell_center(static_cast<std::size_t>(start + c)));
        factor_.matrixL().solveInPlace(ks);
        for (Eigen::Index c = 0; c < cols; ++c) {
            out[static_cast<std::size_t>(start + c)] = std::clamp(1.0 - ks.col(c).squaredNorm(), 0.0, 1.0);
        }
    }
    return out;
}

}  // namespace ergosense
