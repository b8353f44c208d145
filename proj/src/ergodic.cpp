#include "ergosense/ergodic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ergosense/errors.hpp"

namespace ergosense {

namespace {

void check_domain(const Vec& x) {
    if (!in_unit_box(x)) throw std::domain_error("fourier basis evaluated outside the unit box");
}

}  // namespace

double basis_norm(const ModeIndex& k) {
    // int_0^1 cos^2(k pi x) dx is 1 for k = 0 and 1/2 otherwise.
    double h2 = 1.0;
    for (int i = 0; i < k.dim; ++i) {
        if (k.k[i] != 0) h2 *= 0.5;
    }
    return std::sqrt(h2);
}

double fourier_basis(const ModeIndex& k, const Vec& x) {
    check_domain(x);
    if (x.size() != k.dim) throw std::invalid_argument("mode/point dimension mismatch");
    double v = 1.0;
    for (int i = 0; i < k.dim; ++i) v *= std::cos(k.k[i] * std::numbers::pi * x(i));
    return v / basis_norm(k);
}

Vec fourier_basis_grad(const ModeIndex& k, const Vec& x) {
    check_domain(x);
    if (x.size() != k.dim) throw std::invalid_argument("mode/point dimension mismatch");
    const double h = basis_norm(k);
    Vec g(k.dim);
    for (int i = 0; i < k.dim; ++i) {
        const double ki = k.k[i] * std::numbers::pi;
        double v = -ki * std::sin(ki * x(i));
        for (int j = 0; j < k.dim; ++j) {
            if (j != i) v *= std::cos(k.k[j] * std::numbers::pi * x(j));
        }
        g(i) = v / h;
    }
    return g;
}

double lambda_weight(const ModeIndex& k, int n) {
    return std::pow(1.0 + k.norm_squared(), -0.5 * (n + 1));
}

ModeSet::ModeSet(int dim, int k_max) : dim_(dim), k_max_(k_max) {
    if (dim != 2 && dim != 3) throw std::invalid_argument("mode set dimension must be 2 or 3");
    if (k_max < 0) throw std::invalid_argument("k_max must be non-negative");
    const int per_axis = k_max + 1;
    std::size_t count = 1;
    for (int d = 0; d < dim; ++d) count *= static_cast<std::size_t>(per_axis);
    modes_.reserve(count);
    for (std::size_t idx = 0; idx < count; ++idx) {
        ModeIndex m;
        m.dim = dim;
        std::size_t rem = idx;
        for (int d = dim - 1; d >= 0; --d) {
            m.k[d] = static_cast<int>(rem % per_axis);
            rem /= per_axis;
        }
        modes_.push_back(m);
        h_norms_.push_back(basis_norm(m));
        lambdas_.push_back(lambda_weight(m, dim));
    }
}

void ModeSet::axis_tables(const Vec& x, double* cos_table, double* sin_table) const {
    const int per_axis = k_max_ + 1;
    for (int d = 0; d < dim_; ++d) {
        for (int k = 0; k < per_axis; ++k) {
            const double arg = k * std::numbers::pi * x(d);
            cos_table[d * per_axis + k] = std::cos(arg);
            if (sin_table) sin_table[d * per_axis + k] = -k * std::numbers::pi * std::sin(arg);
        }
    }
}

void ModeSet::basis_all(const Vec& x, std::span<double> values) const {
    check_domain(x);
    if (values.size() != modes_.size()) throw std::invalid_argument("basis buffer size mismatch");
    const int per_axis = k_max_ + 1;
    double cos_table[kMaxDim * 64];
    if (per_axis > 64) throw std::invalid_argument("k_max too large");
    axis_tables(x, cos_table, nullptr);
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        double v = 1.0;
        for (int d = 0; d < dim_; ++d) v *= cos_table[d * per_axis + modes_[i].k[d]];
        values[i] = v / h_norms_[i];
    }
}

void ModeSet::basis_grad_all(const Vec& x, std::span<double> grads) const {
    check_domain(x);
    if (grads.size() != modes_.size() * dim_) throw std::invalid_argument("gradient buffer size mismatch");
    const int per_axis = k_max_ + 1;
    double cos_table[kMaxDim * 64];
    double dcos_table[kMaxDim * 64];
    if (per_axis > 64) throw std::invalid_argument("k_max too large");
    axis_tables(x, cos_table, dcos_table);
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        const auto& k = modes_[i].k;
        for (int d = 0; d < dim_; ++d) {
            double v = dcos_table[d * per_axis + k[d]];
            for (int j = 0; j < dim_; ++j) {
                if (j != d) v *= cos_table[j * per_axis + k[j]];
            }
            grads[i * dim_ + d] = v / h_norms_[i];
        }
    }
}

TrajectoryCoeffs::TrajectoryCoeffs(const ModeSet& modes, const Vec& x0)
    : integral_(modes.size(), 0.0), last_basis_(modes.size()), scratch_(modes.size()) {
    modes.basis_all(x0, last_basis_);
}

std::vector<double> TrajectoryCoeffs::coefficients() const {
    std::vector<double> c(integral_.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = coefficient(i);
    return c;
}

void TrajectoryCoeffs::add_sample(const ModeSet& modes, const Vec& x_new, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (modes.size() != integral_.size()) throw std::invalid_argument("mode set mismatch");
    modes.basis_all(x_new, scratch_);
    const double half = 0.5 * dt;
    for (std::size_t i = 0; i < integral_.size(); ++i) {
        integral_[i] += half * (last_basis_[i] + scratch_[i]);
    }
    last_basis_.swap(scratch_);
    elapsed_ += dt;
}

TrajectoryCoeffs update_time_avg_coeffs(TrajectoryCoeffs acc, const ModeSet& modes,
                                        const Vec& x_new, double dt) {
    acc.add_sample(modes, x_new, dt);
    return acc;
}

DistributionCoeffs distribution_coeffs(std::span<const double> density, const GridSpec& grid,
                                       const ModeSet& modes) {
    if (grid.dim != modes.dim()) throw std::invalid_argument("grid/mode dimension mismatch");
    if (density.size() != grid.size()) throw std::invalid_argument("density size does not match grid");
    double mass = 0.0;
    for (double v : density) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("density", "density must be finite and non-negative");
        mass += v;
    }
    mass *= grid.cell_volume();
    if (std::abs(mass - 1.0) > 1e-6) throw ValidationError("density", "density is not normalized");

    // Separable contraction: sum over x first, then y (then z).
    const int G = grid.res;
    const int P = modes.k_max() + 1;
    std::vector<double> cos_tab(static_cast<std::size_t>(P) * G);
    for (int k = 0; k < P; ++k) {
        for (int i = 0; i < G; ++i) cos_tab[k * G + i] = std::cos(k * std::numbers::pi * grid.axis_center(i));
    }
    const double vol = grid.cell_volume();
    DistributionCoeffs out;
    out.phi.assign(modes.size(), 0.0);

    if (grid.dim == 2) {
        // t[kx][iy] = sum_ix rho[iy][ix] cos(kx x)
        std::vector<double> t(static_cast<std::size_t>(P) * G, 0.0);
        for (int iy = 0; iy < G; ++iy) {
            const double* row = density.data() + static_cast<std::size_t>(iy) * G;
            for (int kx = 0; kx < P; ++kx) {
                const double* c = cos_tab.data() + kx * G;
                double s = 0.0;
                for (int ix = 0; ix < G; ++ix) s += row[ix] * c[ix];
                t[kx * G + iy] = s;
            }
        }
        for (std::size_t m = 0; m < modes.size(); ++m) {
            const auto& k = modes.mode(m).k;
            const double* c = cos_tab.data() + k[1] * G;
            const double* tk = t.data() + k[0] * G;
            double s = 0.0;
            for (int iy = 0; iy < G; ++iy) s += tk[iy] * c[iy];
            out.phi[m] = s * vol / modes.h_norm(m);
        }
    } else {
        // t1[kx][iz][iy], then t2[kx][ky][iz].
        const std::size_t GG = static_cast<std::size_t>(G) * G;
        std::vector<double> t1(static_cast<std::size_t>(P) * GG, 0.0);
        for (int iz = 0; iz < G; ++iz) {
            for (int iy = 0; iy < G; ++iy) {
                const double* row = density.data() + (static_cast<std::size_t>(iz) * G + iy) * G;
                for (int kx = 0; kx < P; ++kx) {
                    const double* c = cos_tab.data() + kx * G;
                    double s = 0.0;
                    for (int ix = 0; ix < G; ++ix) s += row[ix] * c[ix];
                    t1[kx * GG + static_cast<std::size_t>(iz) * G + iy] = s;
                }
            }
        }
        std::vector<double> t2(static_cast<std::size_t>(P) * P * G, 0.0);
        for (int kx = 0; kx < P; ++kx) {
            for (int ky = 0; ky < P; ++ky) {
                const double* c = cos_tab.data() + ky * G;
                for (int iz = 0; iz < G; ++iz) {
                    const double* r = t1.data() + kx * GG + static_cast<std::size_t>(iz) * G;
                    double s = 0.0;
                    for (int iy = 0; iy < G; ++iy) s += r[iy] * c[iy];
                    t2[(static_cast<std::size_t>(kx) * P + ky) * G + iz] = s;
                }
            }
        }
        for (std::size_t m = 0; m < modes.size(); ++m) {
            const auto& k = modes.mode(m).k;
            const double* c = cos_tab.data() + k[2] * G;
            const double* r = t2.data() + (static_cast<std::size_t>(k[0]) * P + k[1]) * G;
            double s = 0.0;
            for (int iz = 0; iz < G; ++iz) s += r[iz] * c[iz];
            out.phi[m] = s * vol / modes.h_norm(m);
        }
    }
    return out;
}

double ergodic_metric(std::span<const double> c, std::span<const double> phi, const ModeSet& modes) {
    if (c.size() != modes.size() || phi.size() != modes.size()) {
        throw std::invalid_argument("coefficient count does not match mode set");
    }
    double e = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double d = c[i] - phi[i];
        e += modes.lambda(i) * d * d;
    }
    return e;
}

double ergodic_metric(const TrajectoryCoeffs& c, const DistributionCoeffs& phi, const ModeSet& modes) {
    const auto coeffs = c.coefficients();
    return ergodic_metric(coeffs, phi.phi, modes);
}

}  // namespace ergosense
