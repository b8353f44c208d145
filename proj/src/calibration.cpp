#include "ergosense/calibration.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ergosense/errors.hpp"

namespace ergosense {

namespace {

constexpr int kMaxIterations = 100;
constexpr double kGradTolerance = 1e-8;
constexpr double kMinStep = 1e-12;
constexpr double kHessianRidge = 1e-12;

// -log likelihood with targets t, written to avoid overflow in exp.
double negative_log_likelihood(std::span<const double> f, const std::vector<double>& t, double a, double b) {
    double v = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double z = a * f[i] + b;
        if (z >= 0.0) {
            v += t[i] * z + std::log1p(std::exp(-z));
        } else {
            v += (t[i] - 1.0) * z + std::log1p(std::exp(z));
        }
    }
    return v;
}

}  // namespace

double platt_probability(double decision, const PlattCalibration& calib) {
    const double z = calib.A * decision + calib.B;
    if (z >= 0.0) {
        const double e = std::exp(-z);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(z));
}

PlattCalibration fit_platt(std::span<const double> f, std::span<const int> labels) {
    if (f.size() != labels.size()) throw std::invalid_argument("fit_platt: size mismatch");
    double n_pos = 0.0, n_neg = 0.0;
    for (int l : labels) (l == 1 ? n_pos : n_neg) += 1.0;
    if (n_pos == 0.0 || n_neg == 0.0) throw NotFittable("platt calibration needs both labels");

    const double hi = (n_pos + 1.0) / (n_pos + 2.0);
    const double lo = 1.0 / (n_neg + 2.0);
    std::vector<double> t(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) t[i] = labels[i] == 1 ? hi : lo;

    PlattCalibration c;
    c.A = 0.0;
    c.B = std::log((n_neg + 1.0) / (n_pos + 1.0));
    double fval = negative_log_likelihood(f, t, c.A, c.B);

    for (int it = 0; it < kMaxIterations; ++it) {
        // With p = P(y=1): d/dz of the loss is (t - p).
        double h11 = kHessianRidge, h22 = kHessianRidge, h21 = 0.0, g1 = 0.0, g2 = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double p = platt_probability(f[i], c);
            const double q = 1.0 - p;
            const double w = p * q;
            const double d = t[i] - p;
            h11 += f[i] * f[i] * w;
            h22 += w;
            h21 += f[i] * w;
            g1 += f[i] * d;
            g2 += d;
        }
        if (std::hypot(g1, g2) < kGradTolerance) {
            c.iterations = it;
            return c;
        }
        const double det = h11 * h22 - h21 * h21;
        const double da = -(h22 * g1 - h21 * g2) / det;
        const double db = -(-h21 * g1 + h11 * g2) / det;
        const double gd = g1 * da + g2 * db;

        double step = 1.0;
        bool moved = false;
        while (step >= kMinStep) {
            const double na = c.A + step * da, nb = c.B + step * db;
            const double nf = negative_log_likelihood(f, t, na, nb);
            if (nf < fval + 1e-4 * step * gd) {
                c.A = na;
                c.B = nb;
                fval = nf;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) {
            // No representable decrease left: accept if already at the optimum to rounding.
            if (std::hypot(g1, g2) < 1e-6 * std::max(1.0, static_cast<double>(f.size()))) {
                c.iterations = it;
                return c;
            }
            throw CalibrationError("platt line search failed");
        }
    }
    throw CalibrationError("platt calibration did not converge");
}

PlattCalibration fit_platt(const KernelModel& model, const Dataset& data) {
    std::vector<double> f;
    std::vector<int> labels;
    f.reserve(data.size());
    labels.reserve(data.size());
    for (const auto& m : data) {
        f.push_back(decision_value(model, m.location));
        labels.push_back(m.label);
    }
    return fit_platt(f, labels);
}

double posterior(const KernelModel& model, const PlattCalibration& calib, const Vec& x) {
    return platt_probability(decision_value(model, x), calib);
}

}  // namespace ergosense
