#pragma once

#include <optional>

#include "ergosense/shapes.hpp"
#include "ergosense/types.hpp"

namespace ergosense {

// Point sensor under double-integrator dynamics: d/dt (pos, vel) = (vel, u).
struct SensorState {
    Vec pos;
    Vec vel;

    int dim() const { return static_cast<int>(pos.size()); }
    StateVec stacked() const;
    static SensorState from_stacked(const StateVec& x);
};

using ControlInput = Vec;

inline constexpr double kContactTolerance = 1e-6;

struct Contact {
    Vec point;
    double time = 0.0;
    int shape_id = -1;
};

struct StepResult {
    SensorState state;
    std::optional<Contact> contact;
};

// f(x, u) = g(x) + h(x) u with g = (vel, 0), h = (0, I).
StateVec flow(const SensorState& state, const ControlInput& u);

// Classical RK4 on `flow` with u held constant over the step.
SensorState rk4_step(const SensorState& state, const ControlInput& u, double dt);

ControlInput saturate(const ControlInput& u, double u_max);

// Walls sit this far inside the unit box. Every cosine mode has zero normal
// derivative on the box faces, so a sensor resting exactly on a face receives
// no normal feedback from the ergodic cost and can never leave it.
inline constexpr double kWallInset = 1e-4;

// Wall rule: clamp the position into the inset box and zero any outward velocity component.
// Returns true if a wall was touched.
bool clamp_to_box(SensorState& state);

// Resolves the step prev -> proposed against the box walls and every shape.
// A crossing of a shape boundary is located by bisection to `tol` and reported
// as the contact. The inward normal velocity is zeroed and the sensor slides:
// only the tangential remainder of the step is travelled, so a head-on hit
// stops at the crossing point.
// `t0` / `dt` place the step in time for the contact record.
// Throws InvariantViolation if prev is already inside a shape.
StepResult resolve_collision(const SensorState& prev, const SensorState& proposed, const World& world,
                             double t0 = 0.0, double dt = 0.0, double tol = kContactTolerance);

}  // namespace ergosense
