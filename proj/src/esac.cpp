#include "ergosense/esac.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "ergosense/errors.hpp"

namespace ergosense {

namespace {

int steps_for(double span, double dt) { return static_cast<int>(std::lround(span / dt)); }

bool is_multiple(double span, double dt) {
    const int n = steps_for(span, dt);
    return n >= 1 && std::abs(span - n * dt) <= 1e-9 * std::max(1.0, span);
}

SensorState predict_step(const SensorState& s, const ControlInput& u, double dt) {
    SensorState next = rk4_step(s, u, dt);
    clamp_to_box(next);
    return next;
}

// Position forcing of the costate: (2q/W) sum_k Lambda_k (c_k - phi_k) dF_k/dx.
class AdjointDrive {
public:
    AdjointDrive(std::vector<double> weights, const ModeSet& modes)
        : weights_(std::move(weights)), modes_(modes), grads_(modes.size() * modes.dim()) {}

    Vec operator()(const Vec& pos) {
        modes_.basis_grad_all(pos, grads_);
        const int n = modes_.dim();
        Vec d = Vec::Zero(n);
        for (std::size_t k = 0; k < weights_.size(); ++k) {
            const double w = weights_[k];
            if (w == 0.0) continue;
            for (int i = 0; i < n; ++i) d(i) += w * grads_[k * n + i];
        }
        return d;
    }

private:
    std::vector<double> weights_;
    const ModeSet& modes_;
    std::vector<double> grads_;
};

std::vector<double> horizon_end_coefficients(const TrajectoryCoeffs& history, const PredictedTrajectory& traj,
                                             const ModeSet& modes, double& total_time) {
    std::vector<double> integral = history.integral();
    std::vector<double> fa(modes.size()), fb(modes.size());
    modes.basis_all(traj.states.front().pos, fa);
    for (std::size_t i = 1; i < traj.states.size(); ++i) {
        modes.basis_all(traj.states[i].pos, fb);
        for (std::size_t k = 0; k < integral.size(); ++k) integral[k] += 0.5 * traj.dt * (fa[k] + fb[k]);
        fa.swap(fb);
    }
    total_time = history.elapsed() + traj.dt * static_cast<double>(traj.states.size() - 1);
    for (double& v : integral) v /= total_time;
    return integral;
}

}  // namespace

EsacParams EsacParams::for_dimension(int n) {
    EsacParams p;
    p.r_diag = Vec::Constant(n, 0.01);
    p.u_default = Vec::Zero(n);
    return p;
}

void EsacParams::validate(int dim) const {
    if (!(q > 0.0)) throw ValidationError("esac.q", "q must be positive");
    if (r_diag.size() != dim) throw ValidationError("esac.R", "R diagonal must have one entry per axis");
    for (Eigen::Index i = 0; i < r_diag.size(); ++i) {
        if (!(r_diag(i) > 0.0)) throw ValidationError("esac.R", "R diagonal entries must be positive");
    }
    if (u_default.size() != dim) throw ValidationError("esac.u_default", "u_default must have one entry per axis");
    if (!(alpha_d < 0.0)) throw ValidationError("esac.alpha_d", "alpha_d must be negative");
    if (!(dt > 0.0)) throw ValidationError("dynamics.dt", "dt must be positive");
    if (!(sample_time > 0.0) || !is_multiple(sample_time, dt)) {
        throw ValidationError("dynamics.sample_time", "sample_time must be a positive multiple of dt");
    }
    if (!(horizon > sample_time) || !is_multiple(horizon, dt)) {
        throw ValidationError("esac.horizon", "horizon must exceed sample_time and be a multiple of dt");
    }
    if (!(u_max > 0.0)) throw ValidationError("dynamics.u_max", "u_max must be positive");
}

int EsacParams::horizon_steps() const { return steps_for(horizon, dt); }
int EsacParams::schedule_steps() const { return steps_for(sample_time, dt); }

PredictedTrajectory predict(const SensorState& x0, const EsacParams& params, double t0) {
    PredictedTrajectory traj;
    traj.t0 = t0;
    traj.dt = params.dt;
    const int n = params.horizon_steps();
    traj.states.reserve(n + 1);
    traj.midpoints.reserve(n);
    traj.states.push_back(x0);
    for (int i = 0; i < n; ++i) {
        traj.midpoints.push_back(predict_step(traj.states.back(), params.u_default, 0.5 * params.dt));
        traj.states.push_back(predict_step(traj.states.back(), params.u_default, params.dt));
    }
    return traj;
}

double horizon_cost(const PredictedTrajectory& traj, const TrajectoryCoeffs& history,
                    const DistributionCoeffs& phi, const ModeSet& modes, const EsacParams& params) {
    double total = 0.0;
    const auto c = horizon_end_coefficients(history, traj, modes, total);
    return params.q * ergodic_metric(c, phi.phi, modes);
}

std::vector<StateVec> adjoint_sweep(const PredictedTrajectory& traj, const TrajectoryCoeffs& history,
                                    const DistributionCoeffs& phi, const ModeSet& modes,
                                    const EsacParams& params) {
    if (phi.phi.size() != modes.size() || history.size() != modes.size()) {
        throw std::invalid_argument("adjoint_sweep: coefficient sets are not aligned with the mode set");
    }
    double total = 0.0;
    const auto c = horizon_end_coefficients(history, traj, modes, total);
    std::vector<double> weights(modes.size());
    for (std::size_t k = 0; k < weights.size(); ++k) {
        weights[k] = 2.0 * params.q / total * modes.lambda(k) * (c[k] - phi.phi[k]);
    }
    AdjointDrive drive(std::move(weights), modes);

    const int n = modes.dim();
    const std::size_t steps = traj.midpoints.size();
    const double h = traj.dt;
    std::vector<StateVec> rho(steps + 1, StateVec::Zero(2 * n));

    // rho' = (-drive(pos), -rho_pos); drive does not depend on rho.
    auto rhs = [n](const Vec& d, const StateVec& r) {
        StateVec out(2 * n);
        out.head(n) = -d;
        out.tail(n) = -r.head(n);
        return out;
    };
    Vec d_next = drive(traj.states[steps].pos);
    for (std::size_t i = steps; i-- > 0;) {
        const Vec d_mid = drive(traj.midpoints[i].pos);
        const Vec d_cur = drive(traj.states[i].pos);
        const StateVec& r = rho[i + 1];
        const StateVec k1 = rhs(d_next, r);
        const StateVec k2 = rhs(d_mid, r - 0.5 * h * k1);
        const StateVec k3 = rhs(d_mid, r - 0.5 * h * k2);
        const StateVec k4 = rhs(d_cur, r - h * k3);
        rho[i] = r - (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        d_next = d_cur;
    }
    return rho;
}

double action_objective(const StateVec& rho, const ControlInput& u, const EsacParams& params) {
    const auto n = u.size();
    const Vec v = rho.tail(n);
    const double sens = v.dot(u - params.u_default);
    const double e = sens - params.alpha_d;
    return 0.5 * (e * e + u.dot(params.r_diag.cwiseProduct(u)));
}

ControlInput unconstrained_action(const StateVec& rho, const EsacParams& params) {
    const auto n = params.r_diag.size();
    const Vec v = rho.tail(n);
    Mat m = v * v.transpose();
    m.diagonal() += params.r_diag;
    const Vec b = v * v.dot(params.u_default) + v * params.alpha_d;
    return m.ldlt().solve(b);
}

ControlInput optimal_action(const StateVec& rho, const EsacParams& params) {
    const int n = static_cast<int>(params.r_diag.size());
    const double lim = params.u_max;
    const ControlInput u_free = unconstrained_action(rho, params);
    if ((u_free.array().abs() <= lim).all()) return u_free;

    // Box-constrained: enumerate free / lower / upper for every axis and keep the
    // best feasible stationary point. The objective is convex, so this is exact.
    const Vec v = rho.tail(n);
    Mat q = v * v.transpose();
    q.diagonal() += params.r_diag;
    const Vec b = v * v.dot(params.u_default) + v * params.alpha_d;

    ControlInput best = saturate(u_free, lim);
    double best_obj = action_objective(rho, best, params);
    int combos = 1;
    for (int i = 0; i < n; ++i) combos *= 3;
    for (int code = 1; code < combos; ++code) {
        int state[kMaxDim];
        int rem = code;
        std::vector<int> free_idx;
        ControlInput u = ControlInput::Zero(n);
        for (int i = 0; i < n; ++i) {
            state[i] = rem % 3;
            rem /= 3;
            if (state[i] == 0) {
                free_idx.push_back(i);
            } else {
                u(i) = state[i] == 1 ? -lim : lim;
            }
        }
        if (!free_idx.empty()) {
            const auto nf = static_cast<Eigen::Index>(free_idx.size());
            Mat qff(nf, nf);
            Vec rhs(nf);
            for (Eigen::Index a = 0; a < nf; ++a) {
                rhs(a) = b(free_idx[a]);
                for (int j = 0; j < n; ++j) {
                    if (state[j] != 0) rhs(a) -= q(free_idx[a], j) * u(j);
                }
                for (Eigen::Index c = 0; c < nf; ++c) qff(a, c) = q(free_idx[a], free_idx[c]);
            }
            const Vec uf = qff.ldlt().solve(rhs);
            bool feasible = true;
            for (Eigen::Index a = 0; a < nf; ++a) {
                if (std::abs(uf(a)) > lim) feasible = false;
                u(free_idx[a]) = uf(a);
            }
            if (!feasible) continue;
        }
        const double obj = action_objective(rho, u, params);
        if (obj < best_obj) {
            best_obj = obj;
            best = u;
        }
    }
    return best;
}

ActionSchedule optimal_action_schedule(const PredictedTrajectory& traj, const std::vector<StateVec>& rho,
                                       const EsacParams& params) {
    if (rho.size() != traj.states.size()) throw std::invalid_argument("trajectory and adjoint are not aligned");
    const int steps = params.schedule_steps();
    if (static_cast<std::size_t>(steps) > rho.size()) throw std::invalid_argument("schedule longer than horizon");
    ActionSchedule schedule;
    schedule.times.reserve(steps);
    schedule.controls.reserve(steps);
    for (int i = 0; i < steps; ++i) {
        schedule.times.push_back(traj.t0 + i * traj.dt);
        schedule.controls.push_back(saturate(optimal_action(rho[i], params), params.u_max));
    }
    return schedule;
}

ActionSchedule esac_step(const SensorState& x0, double t_curr, const TrajectoryCoeffs& history,
                         const DistributionCoeffs& phi, const ModeSet& modes, const EsacParams& params) {
    if (x0.dim() != modes.dim()) throw std::invalid_argument("esac_step: state/mode dimension mismatch");
    const PredictedTrajectory traj = predict(x0, params, t_curr);
    const auto rho = adjoint_sweep(traj, history, phi, modes, params);
    return optimal_action_schedule(traj, rho, params);
}

}  // namespace ergosense
