#include "ergosense/estimator.hpp"

#include <algorithm>
#include <cmath>

#include "ergosense/errors.hpp"

namespace ergosense {

std::string to_string(Representation r) { return r == Representation::Svm ? "svm" : "gp"; }

Representation representation_from_string(const std::string& name) {
    if (name == "svm") return Representation::Svm;
    if (name == "gp") return Representation::Gp;
    throw ValidationError("estimator.representation", "must be 'svm' or 'gp'");
}

void EstimatorParams::validate() const {
    if (!(sigma > 0.0)) throw ValidationError("estimator.sigma", "sigma must be positive");
    if (!(C > 0.0)) throw ValidationError("estimator.C", "C must be positive");
    if (!(noise > 0.0)) throw ValidationError("estimator.noise", "noise must be positive");
    if (caps.contact_cap < 1) throw ValidationError("estimator.contact_cap", "contact_cap must be at least 1");
    if (caps.free_cap < 1) throw ValidationError("estimator.free_cap", "free_cap must be at least 1");
    if (!(caps.cell > 0.0)) throw ValidationError("estimator.thinning_cell", "thinning_cell must be positive");
    if (!(refit_interval > 0.0)) throw ValidationError("estimator.refit_interval", "refit_interval must be positive");
    if (refit_count < 1) throw ValidationError("estimator.refit_count", "refit_count must be at least 1");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ValidationError("estimator.epsilon", "epsilon must be in (0, 1)");
    if (!(free_interval > 0.0)) throw ValidationError("estimator.free_interval", "free_interval must be positive");
}

Representation ShapeEstimate::representation() const {
    return std::holds_alternative<Svm>(impl_) ? Representation::Svm : Representation::Gp;
}

double ShapeEstimate::level(const Vec& x) const {
    if (const auto* s = svm()) return decision_value(s->model, x);
    return -gp()->mean(x);
}

std::vector<double> ShapeEstimate::level_grid(const GridSpec& grid) const {
    if (const auto* s = svm()) return decision_grid(s->model, grid);
    auto m = gp()->mean_grid(grid);
    for (double& v : m) v = -v;
    return m;
}

double ShapeEstimate::target_weight(const Vec& x) const {
    if (const auto* s = svm()) return posterior(s->model, s->calib, x);
    return gp()->variance(x);
}

std::vector<double> ShapeEstimate::target_weight_grid(const GridSpec& grid) const {
    if (const auto* s = svm()) return posterior_grid(s->model, s->calib, grid);
    return gp()->variance_grid(grid);
}

TargetDistribution ShapeEstimate::target(const GridSpec& grid, double epsilon, const ModeSet& modes) const {
    if (const auto* s = svm()) return build_target(s->model, s->calib, grid, epsilon, modes);
    return build_gp_target(*gp(), grid, epsilon, modes);
}

ShapeEstimator::ShapeEstimator(EstimatorParams params) : params_(std::move(params)) { params_.validate(); }

void ShapeEstimator::add(const Measurement& m) { pending_.push_back(m); }

bool ShapeEstimator::refit_due(double t) const {
    if (pending_.empty()) return false;
    return pending_.size() >= params_.refit_count || t - last_refit_time_ >= params_.refit_interval - 1e-9;
}

bool ShapeEstimator::refit(double t) {
    last_refit_time_ = t;
    if (!pending_.empty()) {
        training_.insert(training_.end(), pending_.begin(), pending_.end());
        pending_.clear();
        training_ = decimate(training_, params_.caps);
    }
    const std::size_t n_pos = count_label(training_, 1);
    if (params_.representation == Representation::Svm && (n_pos == 0 || n_pos == training_.size())) {
        last_error_ = "single-class data";
        return false;
    }
    if (training_.empty()) return false;
    try {
        if (params_.representation == Representation::Svm) {
            std::vector<double> decisions;
            ShapeEstimate::Svm fit{fit_kernel_model(training_, params_.sigma, params_.C, {}, &decisions), {}};
            std::vector<int> labels;
            labels.reserve(training_.size());
            for (const auto& m : training_) labels.push_back(m.label);
            try {
                fit.calib = fit_platt(decisions, labels);
            } catch (const CalibrationError&) {
                // Keep the new boundary with the previous calibration, if there is one.
                const auto* prev = current_ ? current_->svm() : nullptr;
                if (!prev) throw;
                fit.calib = prev->calib;
            }
            current_ = std::make_shared<const ShapeEstimate>(std::move(fit));
        } else {
            current_ = std::make_shared<const ShapeEstimate>(fit_gp(training_, params_.sigma, params_.noise));
        }
    } catch (const NotFittable& e) {
        last_error_ = e.what();
        return false;
    } catch (const CalibrationError& e) {
        last_error_ = e.what();
        return false;
    } catch (const EstimatorError& e) {
        last_error_ = e.what();
        return false;
    }
    last_error_.clear();
    ++fit_count_;
    return true;
}

}  // namespace ergosense
