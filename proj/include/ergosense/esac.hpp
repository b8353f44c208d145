#pragma once

#include <vector>

#include "ergosense/dynamics.hpp"
#include "ergosense/ergodic.hpp"

namespace ergosense {

struct EsacParams {
    double q = 30.0;
    Vec r_diag = make_vec({0.01, 0.01});
    double horizon = 0.8;
    double alpha_d = -555.0;
    Vec u_default = make_vec({0.0, 0.0});
    double sample_time = 0.05;
    double u_max = 10.0;
    double dt = 0.01;

    // Defaults sized for dimension n (R = 0.01 I, u0 = 0).
    static EsacParams for_dimension(int n);
    // Throws ValidationError naming the offending field.
    void validate(int dim) const;

    int horizon_steps() const;
    int schedule_steps() const;
};

// Free-space rollout under the default control; walls clamp as in the simulator,
// shapes are ignored. Midpoint states feed the backward RK4 adjoint sweep.
struct PredictedTrajectory {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<SensorState> states;     // horizon_steps + 1 grid states
    std::vector<SensorState> midpoints;  // horizon_steps half-step states
};

struct ActionSchedule {
    std::vector<double> times;
    std::vector<ControlInput> controls;
};

PredictedTrajectory predict(const SensorState& x0, const EsacParams& params, double t0 = 0.0);

// Ergodic tracking cost q * E at the end of the predicted horizon.
double horizon_cost(const PredictedTrajectory& traj, const TrajectoryCoeffs& history,
                    const DistributionCoeffs& phi, const ModeSet& modes, const EsacParams& params);

// Backward RK4 sweep of the costate, rho(t0 + T) = 0. One 2n-vector per grid state.
std::vector<StateVec> adjoint_sweep(const PredictedTrajectory& traj, const TrajectoryCoeffs& history,
                                    const DistributionCoeffs& phi, const ModeSet& modes,
                                    const EsacParams& params);

// Pointwise minimizer of 1/2 [(rho^T (f(x,u) - f(x,u0)) - alpha_d)^2 + u^T R u] over the
// saturation box. Equals (M + R^T)^-1 (M u0 + h^T rho alpha_d), M = h^T rho rho^T h,
// whenever that lies inside the box.
ControlInput optimal_action(const StateVec& rho, const EsacParams& params);
ControlInput unconstrained_action(const StateVec& rho, const EsacParams& params);

// The integrand above, for a given control.
double action_objective(const StateVec& rho, const ControlInput& u, const EsacParams& params);

ActionSchedule optimal_action_schedule(const PredictedTrajectory& traj, const std::vector<StateVec>& rho,
                                       const EsacParams& params);

ActionSchedule esac_step(const SensorState& x0, double t_curr, const TrajectoryCoeffs& history,
                         const DistributionCoeffs& phi, const ModeSet& modes, const EsacParams& params);

}  // namespace ergosense
