#include "ergosense/kernel_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ergosense/errors.hpp"

namespace ergosense {

namespace {

constexpr double kTau = 1e-12;
// exp(-40) ~ 4e-18: kernel tails below this are dropped on grids.
constexpr double kGridCutoff = 40.0;

}  // namespace

double rbf_kernel(const Vec& a, const Vec& b, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("rbf_kernel: sigma must be positive");
    return std::exp(-(a - b).squaredNorm() / (sigma * sigma));
}

Eigen::MatrixXd kernel_matrix(std::span<const Vec> points, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("kernel_matrix: sigma must be positive");
    const auto n = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXd k(n, n);
    const double inv = 1.0 / (sigma * sigma);
    for (Eigen::Index j = 0; j < n; ++j) {
        k(j, j) = 1.0;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            const double v = std::exp(-(points[i] - points[j]).squaredNorm() * inv);
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    return k;
}

DualSolution solve_svm_dual(const Eigen::MatrixXd& kernel, std::span<const int> labels, double C,
                            const SmoOptions& options, const std::vector<double>* warm_start) {
    const std::size_t n = labels.size();
    if (static_cast<std::size_t>(kernel.rows()) != n || static_cast<std::size_t>(kernel.cols()) != n) {
        throw std::invalid_argument("solve_svm_dual: kernel size mismatch");
    }
    if (!(C > 0.0)) throw std::invalid_argument("solve_svm_dual: C must be positive");
    const double eps = options.tolerance;
    const std::size_t max_iter =
        options.max_iterations ? options.max_iterations : std::max<std::size_t>(10'000'000, 100 * n);

    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0);  // gradient of 1/2 a^T Q a - e^T a
    std::vector<double> y(n);
    const Eigen::VectorXd diag = kernel.diagonal();
    for (std::size_t i = 0; i < n; ++i) y[i] = labels[i] > 0 ? 1.0 : -1.0;

    if (warm_start) {
        if (warm_start->size() != n) throw std::invalid_argument("solve_svm_dual: warm start size mismatch");
        alpha = *warm_start;
        for (std::size_t j = 0; j < n; ++j) {
            if (alpha[j] == 0.0) continue;
            const double w = alpha[j] * y[j];
            const double* col = kernel.col(static_cast<Eigen::Index>(j)).data();
            for (std::size_t t = 0; t < n; ++t) grad[t] += y[t] * w * col[t];
        }
    }

    auto in_up = [&](std::size_t t) { return y[t] > 0 ? alpha[t] < C : alpha[t] > 0.0; };
    auto in_low = [&](std::size_t t) { return y[t] > 0 ? alpha[t] > 0.0 : alpha[t] < C; };

    std::size_t iter = 0;
    for (; iter < max_iter; ++iter) {
        // i maximizes -y G over I_up (lowest index on ties).
        double gmax = -std::numeric_limits<double>::infinity();
        std::size_t i = n;
        for (std::size_t t = 0; t < n; ++t) {
            if (!in_up(t)) continue;
            const double v = -y[t] * grad[t];
            if (v > gmax) {
                gmax = v;
                i = t;
            }
        }
        if (i == n) break;
        const double* ki = kernel.col(static_cast<Eigen::Index>(i)).data();

        double gmin = std::numeric_limits<double>::infinity();
        double best = std::numeric_limits<double>::infinity();
        std::size_t j = n;
        for (std::size_t t = 0; t < n; ++t) {
            if (!in_low(t)) continue;
            const double v = -y[t] * grad[t];
            gmin = std::min(gmin, v);
            const double b = gmax - v;
            if (b > 0.0) {
                double a = diag[i] + diag[t] - 2.0 * ki[t];
                if (a <= 0.0) a = kTau;
                const double obj = -(b * b) / a;
                if (obj < best) {
                    best = obj;
                    j = t;
                }
            }
        }
        if (j == n || gmax - gmin < eps) break;
        const double* kj = kernel.col(static_cast<Eigen::Index>(j)).data();

        const double old_ai = alpha[i], old_aj = alpha[j];
        const double kii = ki[i], kjj = kj[j], kij = ki[j];
        double quad = kii + kjj - 2.0 * kij;
        if (quad <= 0.0) quad = kTau;
        if (y[i] != y[j]) {
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0) {
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = C - diff;
                }
            } else if (alpha[j] > C) {
                alpha[j] = C;
                alpha[i] = C + diff;
            }
        } else {
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > C) {
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = sum - C;
                }
            } else if (alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > C) {
                if (alpha[j] > C) {
                    alpha[j] = C;
                    alpha[i] = sum - C;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        const double di = (alpha[i] - old_ai) * y[i];
        const double dj = (alpha[j] - old_aj) * y[j];
        for (std::size_t t = 0; t < n; ++t) grad[t] += y[t] * (di * ki[t] + dj * kj[t]);
    }

    DualSolution sol;
    sol.iterations = iter;
    // Offset from free vectors, else the midpoint of the feasible interval.
    double ub = std::numeric_limits<double>::infinity(), lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    std::size_t n_free = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yg = y[t] * grad[t];
        if (alpha[t] >= C) {
            if (y[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else if (alpha[t] <= 0.0) {
            if (y[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else {
            ++n_free;
            sum_free += yg;
        }
    }
    sol.rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);
    double obj = 0.0;
    for (std::size_t t = 0; t < n; ++t) obj += alpha[t] * (grad[t] - 1.0);
    sol.objective = 0.5 * obj;
    sol.alphas = std::move(alpha);
    return sol;
}

std::vector<std::size_t> canonical_order(const Dataset& data) {
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const Vec& pa = data[a].location;
        const Vec& pb = data[b].location;
        for (Eigen::Index i = 0; i < pa.size(); ++i) {
            if (pa(i) != pb(i)) return pa(i) < pb(i);
        }
        return data[a].label < data[b].label;
    });
    return order;
}

KernelModel fit_kernel_model(const Dataset& data, double sigma, double C, const SmoOptions& options,
                             std::vector<double>* training_decisions) {
    if (!(sigma > 0.0)) throw std::invalid_argument("fit_kernel_model: sigma must be positive");
    if (!(C > 0.0)) throw std::invalid_argument("fit_kernel_model: C must be positive");
    const std::size_t n_pos = count_label(data, 1);
    if (n_pos == 0 || n_pos == data.size()) throw NotFittable("kernel model needs both labels");

    const auto order = canonical_order(data);
    std::vector<Vec> points;
    std::vector<int> labels;
    points.reserve(order.size());
    labels.reserve(order.size());
    for (std::size_t idx : order) {
        points.push_back(data[idx].location);
        labels.push_back(data[idx].label == 1 ? 1 : -1);
    }
    const Eigen::MatrixXd k = kernel_matrix(points, sigma);
    const DualSolution sol = solve_svm_dual(k, labels, C, options);

    KernelModel model;
    model.sigma = sigma;
    model.C = C;
    model.bias = sol.rho;
    model.dual_objective = sol.objective;
    model.iterations = sol.iterations;
    if (training_decisions) {
        training_decisions->assign(data.size(), 0.0);
        for (std::size_t t = 0; t < points.size(); ++t) {
            double s = 0.0;
            for (std::size_t j = 0; j < points.size(); ++j) {
                if (sol.alphas[j] > 0.0) s += sol.alphas[j] * labels[j] * k(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(t));
            }
            (*training_decisions)[order[t]] = -s + sol.rho;
        }
    }
    for (std::size_t t = 0; t < points.size(); ++t) {
        if (sol.alphas[t] > 0.0) {
            model.support_points.push_back(points[t]);
            model.alphas.push_back(sol.alphas[t]);
            model.labels.push_back(labels[t]);
        }
    }
    return model;
}

double decision_value(const KernelModel& model, const Vec& x) {
    const double inv = 1.0 / (model.sigma * model.sigma);
    double s = 0.0;
    for (std::size_t k = 0; k < model.alphas.size(); ++k) {
        s += model.alphas[k] * model.labels[k] * std::exp(-(model.support_points[k] - x).squaredNorm() * inv);
    }
    return -s + model.bias;
}

std::vector<double> decision_grid(const KernelModel& model, const GridSpec& grid) {
    const int G = grid.res;
    const int dim = grid.dim;
    std::vector<double> out(grid.size(), 0.0);
    const double inv = 1.0 / (model.sigma * model.sigma);
    const double reach = std::sqrt(kGridCutoff) * model.sigma;

    std::vector<double> fac(static_cast<std::size_t>(kMaxDim) * G);
    int lo[kMaxDim], hi[kMaxDim];
    for (std::size_t k = 0; k < model.alphas.size(); ++k) {
        const Vec& s = model.support_points[k];
        bool empty = false;
        for (int d = 0; d < dim; ++d) {
            lo[d] = std::max(0, static_cast<int>(std::floor((s(d) - reach) * G - 0.5)));
            hi[d] = std::min(G - 1, static_cast<int>(std::ceil((s(d) + reach) * G - 0.5)));
            if (lo[d] > hi[d]) empty = true;
            for (int i = lo[d]; i <= hi[d]; ++i) {
                const double r = grid.axis_center(i) - s(d);
                fac[d * G + i] = std::exp(-r * r * inv);
            }
        }
        if (empty) continue;
        const double w = -model.alphas[k] * model.labels[k];
        const double* fx = fac.data();
        const double* fy = fac.data() + G;
        if (dim == 2) {
            for (int iy = lo[1]; iy <= hi[1]; ++iy) {
                const double wy = w * fy[iy];
                double* row = out.data() + static_cast<std::size_t>(iy) * G;
                for (int ix = lo[0]; ix <= hi[0]; ++ix) row[ix] += wy * fx[ix];
            }
        } else {
            const double* fz = fac.data() + 2 * G;
            for (int iz = lo[2]; iz <= hi[2]; ++iz) {
                const double wz = w * fz[iz];
                for (int iy = lo[1]; iy <= hi[1]; ++iy) {
                    const double wy = wz * fy[iy];
                    double* row = out.data() + (static_cast<std::size_t>(iz) * G + iy) * G;
                    for (int ix = lo[0]; ix <= hi[0]; ++ix) row[ix] += wy * fx[ix];
                }
            }
        }
    }
    for (double& v : out) v += model.bias;
    return out;
}

}  // namespace ergosense
