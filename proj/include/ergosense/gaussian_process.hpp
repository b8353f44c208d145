#pragma once

#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "ergosense/dataset.hpp"
#include "ergosense/grid.hpp"

namespace ergosense {

// GP regression on +/-1 labels (collision = +1) with the RBF kernel and unit
// prior variance. The mean's zero level set is the shape estimate.
class GpModel {
public:
    double mean(const Vec& x) const;
    double variance(const Vec& x) const;

    std::vector<double> mean_grid(const GridSpec& grid) const;
    std::vector<double> variance_grid(const GridSpec& grid) const;

    double sigma() const { return sigma_; }
    double noise() const { return noise_; }
    double jitter() const { return jitter_; }
    std::size_t size() const { return points_.size(); }

private:
    friend GpModel fit_gp(const Dataset& data, double sigma, double noise);

    Eigen::VectorXd kernel_column(const Vec& x) const;

    std::vector<Vec> points_;
    Eigen::VectorXd weights_;  // (K + noise I)^-1 y
    Eigen::LLT<Eigen::MatrixXd> factor_;
    double sigma_ = 0.08;
    double noise_ = 1e-2;
    double jitter_ = 0.0;
};

// Throws std::invalid_argument on empty data or noise <= 0, EstimatorError if the
// regularized kernel matrix cannot be factored even with jitter up to 1e-4.
GpModel fit_gp(const Dataset& data, double sigma, double noise);

inline double gp_mean(const GpModel& model, const Vec& x) { return model.mean(x); }
inline double gp_variance(const GpModel& model, const Vec& x) { return model.variance(x); }

}  // namespace ergosense
