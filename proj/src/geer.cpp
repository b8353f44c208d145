#include "ergosense/geer.hpp"

#include <algorithm>
#include <vector>

#include "ergosense/errors.hpp"

namespace ergosense {

void GeerParams::validate() const {
    if (candidate_count < 1) throw ValidationError("geer.candidates", "candidate count must be at least 1");
    if (!(radius > 0.0)) throw ValidationError("geer.radius", "radius must be positive");
    if (!(replan_interval > 0.0)) throw ValidationError("geer.replan_interval", "replan interval must be positive");
    if (!(kp > 0.0)) throw ValidationError("geer.kp", "kp must be positive");
    if (!(kd >= 0.0)) throw ValidationError("geer.kd", "kd must be non-negative");
    if (!(reach_tolerance > 0.0)) throw ValidationError("geer.reach_tolerance", "reach tolerance must be positive");
    if (!(u_max > 0.0)) throw ValidationError("dynamics.u_max", "u_max must be positive");
}

Vec select_waypoint(const Vec& pos, const ShapeEstimate* estimate, const GeerParams& params, Rng& rng) {
    const auto n = pos.size();
    const double r2 = params.radius * params.radius;
    Vec best;
    double best_score = -1.0;
    double best_dist = 0.0;
    for (int c = 0; c < params.candidate_count; ++c) {
        Vec offset(n);
        do {
            for (Eigen::Index i = 0; i < n; ++i) offset(i) = rng.uniform(-params.radius, params.radius);
        } while (offset.squaredNorm() > r2);
        const Vec cand = (pos + offset).cwiseMax(0.0).cwiseMin(1.0);
        const double score = estimate ? estimate->target_weight(cand) : 1.0;
        const double dist = (cand - pos).norm();
        if (score > best_score || (score == best_score && dist < best_dist)) {
            best = cand;
            best_score = score;
            best_dist = dist;
        }
    }
    return best;
}

ControlInput waypoint_control(const SensorState& state, const Vec& waypoint, const GeerParams& params) {
    return saturate(params.kp * (waypoint - state.pos) - params.kd * state.vel, params.u_max);
}

GeerPolicy::GeerPolicy(GeerParams params) : params_(std::move(params)) { params_.validate(); }

ControlInput GeerPolicy::step(const SensorState& state, double t, const ShapeEstimate* estimate, Rng& rng) {
    const bool reached = waypoint_ && (*waypoint_ - state.pos).norm() <= params_.reach_tolerance;
    const bool stale = waypoint_ && t - planned_at_ >= params_.replan_interval - 1e-9;
    if (!waypoint_ || reached || stale) {
        waypoint_ = select_waypoint(state.pos, estimate, params_, rng);
        planned_at_ = t;
    }
    return waypoint_control(state, *waypoint_, params_);
}

}  // namespace ergosense
