#pragma once

#include <optional>

#include "ergosense/dynamics.hpp"
#include "ergosense/estimator.hpp"
#include "ergosense/rng.hpp"

namespace ergosense {

// Greedy baseline: go to the nearby sample with the highest collision likelihood.
struct GeerParams {
    int candidate_count = 50;
    double radius = 0.15;
    double replan_interval = 0.5;
    double kp = 40.0;
    double kd = 12.0;
    double reach_tolerance = 0.02;
    double u_max = 10.0;

    void validate() const;
};

// Samples candidate_count points uniformly in the radius ball around `pos`
// (clipped to the box) and returns the one with the largest target weight.
// Ties go to the smallest distance, then the lowest sample index. With no
// estimate every candidate scores the same.
Vec select_waypoint(const Vec& pos, const ShapeEstimate* estimate, const GeerParams& params, Rng& rng);

// Saturated PD control toward the waypoint.
ControlInput waypoint_control(const SensorState& state, const Vec& waypoint, const GeerParams& params);

class GeerPolicy {
public:
    explicit GeerPolicy(GeerParams params);

    // Re-plans when there is no waypoint, it has been reached, or the
    // re-planning interval has elapsed.
    ControlInput step(const SensorState& state, double t, const ShapeEstimate* estimate, Rng& rng);

    const std::optional<Vec>& waypoint() const { return waypoint_; }
    const GeerParams& params() const { return params_; }

private:
    GeerParams params_;
    std::optional<Vec> waypoint_;
    double planned_at_ = 0.0;
};

}  // namespace ergosense
