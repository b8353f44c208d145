#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ergosense/calibration.hpp"
#include "ergosense/dataset.hpp"
#include "ergosense/gaussian_process.hpp"
#include "ergosense/kernel_model.hpp"
#include "ergosense/target.hpp"

namespace ergosense {

enum class Representation { Svm, Gp };

std::string to_string(Representation r);
Representation representation_from_string(const std::string& name);

struct EstimatorParams {
    Representation representation = Representation::Svm;
    double sigma = 0.08;
    double C = 10.0;
    double noise = 1e-2;  // GP observation noise variance
    DecimationCaps caps;
    double refit_interval = 0.5;
    std::size_t refit_count = 25;
    double epsilon = 1e-3;
    // Free-space readings are taken at this period whenever the sensor is not in contact.
    double free_interval = 0.01;

    void validate() const;
};

// A fitted shape estimate, independent of representation. Level values follow
// the contact convention: negative on the collision side.
class ShapeEstimate {
public:
    struct Svm {
        KernelModel model;
        PlattCalibration calib;
    };

    explicit ShapeEstimate(Svm svm) : impl_(std::move(svm)) {}
    explicit ShapeEstimate(GpModel gp) : impl_(std::move(gp)) {}

    Representation representation() const;
    double level(const Vec& x) const;
    std::vector<double> level_grid(const GridSpec& grid) const;
    // Weight the exploration target is proportional to: collision posterior
    // for the classifier, predictive variance for the GP.
    double target_weight(const Vec& x) const;
    std::vector<double> target_weight_grid(const GridSpec& grid) const;
    TargetDistribution target(const GridSpec& grid, double epsilon, const ModeSet& modes) const;

    const Svm* svm() const { return std::get_if<Svm>(&impl_); }
    const GpModel* gp() const { return std::get_if<GpModel>(&impl_); }

private:
    std::variant<Svm, GpModel> impl_;
};

// Owns the training set and refit cadence. Fits produce immutable estimates that
// the simulation swaps in between control steps.
class ShapeEstimator {
public:
    explicit ShapeEstimator(EstimatorParams params);

    void add(const Measurement& m);
    bool refit_due(double t) const;
    // Refits from the decimated training set. Returns true if a new estimate
    // replaced the current one; failures leave the previous estimate in place.
    bool refit(double t);

    std::shared_ptr<const ShapeEstimate> current() const { return current_; }
    const Dataset& training_set() const { return training_; }
    const EstimatorParams& params() const { return params_; }
    const std::string& last_error() const { return last_error_; }
    std::size_t fit_count() const { return fit_count_; }

private:
    EstimatorParams params_;
    Dataset training_;
    Dataset pending_;
    double last_refit_time_ = 0.0;
    std::shared_ptr<const ShapeEstimate> current_;
    std::string last_error_;
    std::size_t fit_count_ = 0;
};

}  // namespace ergosense
