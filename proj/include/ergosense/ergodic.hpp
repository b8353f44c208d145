#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "ergosense/grid.hpp"
#include "ergosense/types.hpp"

namespace ergosense {

// Wave-number vector k of a separable cosine mode.
struct ModeIndex {
    std::array<int, kMaxDim> k{};
    int dim = 2;

    double norm_squared() const {
        double s = 0.0;
        for (int i = 0; i < dim; ++i) s += static_cast<double>(k[i]) * k[i];
        return s;
    }
};

// Normalization h_k such that F_k = prod cos(k_i pi x_i) / h_k has unit L2 norm on [0,1]^n.
double basis_norm(const ModeIndex& k);

// F_k(x). Throws std::domain_error outside the closed unit box.
double fourier_basis(const ModeIndex& k, const Vec& x);
Vec fourier_basis_grad(const ModeIndex& k, const Vec& x);

// Sobolev-type weight (1 + |k|^2)^(-(n+1)/2).
double lambda_weight(const ModeIndex& k, int n);

// All modes on {0..k_max}^n, first axis slowest.
class ModeSet {
public:
    ModeSet(int dim, int k_max);

    int dim() const { return dim_; }
    int k_max() const { return k_max_; }
    std::size_t size() const { return modes_.size(); }

    const ModeIndex& mode(std::size_t i) const { return modes_[i]; }
    double h_norm(std::size_t i) const { return h_norms_[i]; }
    double lambda(std::size_t i) const { return lambdas_[i]; }
    std::span<const double> lambdas() const { return lambdas_; }

    // F_k(x) for every mode; `values` must have size().
    void basis_all(const Vec& x, std::span<double> values) const;
    // Gradients laid out mode-major: grads[i * dim + d].
    void basis_grad_all(const Vec& x, std::span<double> grads) const;

private:
    void axis_tables(const Vec& x, double* cos_table, double* sin_table) const;

    int dim_;
    int k_max_;
    std::vector<ModeIndex> modes_;
    std::vector<double> h_norms_;
    std::vector<double> lambdas_;
};

// Running time-average of F_k along a trajectory, trapezoidal in time.
// At elapsed == 0 the coefficients are F_k of the initial point.
class TrajectoryCoeffs {
public:
    TrajectoryCoeffs(const ModeSet& modes, const Vec& x0);

    double elapsed() const { return elapsed_; }
    std::size_t size() const { return integral_.size(); }
    double coefficient(std::size_t i) const {
        return elapsed_ > 0.0 ? integral_[i] / elapsed_ : last_basis_[i];
    }
    std::vector<double> coefficients() const;

    // Time integral of F_k since t0.
    const std::vector<double>& integral() const { return integral_; }
    const std::vector<double>& last_basis() const { return last_basis_; }

    // Throws std::invalid_argument when dt <= 0.
    void add_sample(const ModeSet& modes, const Vec& x_new, double dt);

private:
    std::vector<double> integral_;
    std::vector<double> last_basis_;
    std::vector<double> scratch_;
    double elapsed_ = 0.0;
};

TrajectoryCoeffs update_time_avg_coeffs(TrajectoryCoeffs acc, const ModeSet& modes,
                                        const Vec& x_new, double dt);

struct DistributionCoeffs {
    std::vector<double> phi;
};

// Midpoint quadrature of the density against every mode. The density must be
// non-negative and integrate to one (cell-sum x cell-volume within 1e-6).
DistributionCoeffs distribution_coeffs(std::span<const double> density, const GridSpec& grid,
                                       const ModeSet& modes);

double ergodic_metric(std::span<const double> c, std::span<const double> phi,
                      const ModeSet& modes);
double ergodic_metric(const TrajectoryCoeffs& c, const DistributionCoeffs& phi,
                      const ModeSet& modes);

}  // namespace ergosense
