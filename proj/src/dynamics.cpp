#include "ergosense/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ergosense/errors.hpp"

namespace ergosense {

StateVec SensorState::stacked() const {
    const int n = dim();
    StateVec x(2 * n);
    x.head(n) = pos;
    x.tail(n) = vel;
    return x;
}

SensorState SensorState::from_stacked(const StateVec& x) {
    const auto n = x.size() / 2;
    return {x.head(n), x.tail(n)};
}

StateVec flow(const SensorState& state, const ControlInput& u) {
    const int n = state.dim();
    if (state.vel.size() != n || u.size() != n) throw std::invalid_argument("flow: dimension mismatch");
    StateVec d(2 * n);
    d.head(n) = state.vel;
    d.tail(n) = u;
    return d;
}

SensorState rk4_step(const SensorState& state, const ControlInput& u, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("rk4_step: dt must be positive");
    const StateVec x = state.stacked();
    const StateVec k1 = flow(state, u);
    const StateVec k2 = flow(SensorState::from_stacked(x + 0.5 * dt * k1), u);
    const StateVec k3 = flow(SensorState::from_stacked(x + 0.5 * dt * k2), u);
    const StateVec k4 = flow(SensorState::from_stacked(x + dt * k3), u);
    return SensorState::from_stacked(x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

ControlInput saturate(const ControlInput& u, double u_max) {
    if (!(u_max > 0.0)) throw std::invalid_argument("saturate: u_max must be positive");
    return u.cwiseMax(-u_max).cwiseMin(u_max);
}

bool clamp_to_box(SensorState& state) {
    bool touched = false;
    for (int i = 0; i < state.dim(); ++i) {
        if (state.pos(i) < kWallInset) {
            state.pos(i) = kWallInset;
            state.vel(i) = std::max(state.vel(i), 0.0);
            touched = true;
        } else if (state.pos(i) > 1.0 - kWallInset) {
            state.pos(i) = 1.0 - kWallInset;
            state.vel(i) = std::min(state.vel(i), 0.0);
            touched = true;
        }
    }
    return touched;
}

namespace {

struct Crossing {
    double s = 0.0;  // fraction of the segment, outside end of the final bracket
    int shape = -1;
};

// First crossing of any shape boundary along a -> a + seg.
std::optional<Crossing> first_crossing(const Vec& a, const Vec& seg, const std::vector<Shape>& shapes, double tol) {
    const double len = seg.norm();
    if (len == 0.0) return std::nullopt;
    // Sample the segment finely enough that no feature thicker than ~2e-3 is skipped.
    const int samples = std::max(1, static_cast<int>(std::ceil(len / 2e-3)));
    std::optional<Crossing> best;
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        const Shape& shape = shapes[i];
        double s_prev = 0.0;
        for (int j = 1; j <= samples; ++j) {
            const double s = static_cast<double>(j) / samples;
            if (best && s >= best->s) break;
            if (shape.boundary_value(a + s * seg) <= 0.0) {
                // Bracket [s_prev, s]: outside at s_prev, inside at s.
                double lo = s_prev, hi = s;
                for (int it = 0; it < 200; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (shape.boundary_value(a + mid * seg) <= 0.0) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                    if ((hi - lo) * len < 1e-3 * tol) break;
                    if (shape.boundary_value(a + lo * seg) <= tol && (hi - lo) * len < tol) break;
                }
                best = Crossing{lo, static_cast<int>(i)};
                break;
            }
            s_prev = s;
        }
    }
    return best;
}

Vec unit_normal(const Shape& shape, const Vec& x) {
    Vec n = shape.gradient(x);
    const double nn = n.norm();
    return nn > 0.0 ? Vec(n / nn) : Vec(Vec::Zero(x.size()));
}

}  // namespace

StepResult resolve_collision(const SensorState& prev, const SensorState& proposed, const World& world,
                             double t0, double dt, double tol) {
    const auto& shapes = world.shapes();
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        if (shapes[i].boundary_value(prev.pos) < -tol) {
            throw InvariantViolation("sensor starts the step inside shape " + std::to_string(i));
        }
    }

    SensorState next = proposed;
    clamp_to_box(next);
    if (shapes.empty()) return {next, std::nullopt};

    auto hit = first_crossing(prev.pos, next.pos - prev.pos, shapes, tol);
    if (!hit) return {next, std::nullopt};

    StepResult out;
    Vec pos = prev.pos + hit->s * (next.pos - prev.pos);
    out.contact = Contact{pos, t0 + hit->s * dt, hit->shape};

    Vec vel = next.vel;
    Vec target = next.pos;
    // Slide: the part of the remaining displacement tangent to the surface is
    // still travelled, checked again for crossings. A head-on hit stops dead.
    for (int iter = 0; iter < 4; ++iter) {
        const Vec n = unit_normal(shapes[hit->shape], pos);
        const double vn = vel.dot(n);
        if (vn < 0.0) vel -= vn * n;
        Vec rest = target - pos;
        const double rn = rest.dot(n);
        if (rn < 0.0) rest -= rn * n;
        SensorState slid{pos + rest, vel};
        clamp_to_box(slid);
        target = slid.pos;
        vel = slid.vel;
        if ((target - pos).norm() < tol) break;
        hit = first_crossing(pos, target - pos, shapes, tol);
        if (!hit) {
            pos = target;
            break;
        }
        pos = pos + hit->s * (target - pos);
    }
    out.state.pos = pos;
    out.state.vel = vel;
    clamp_to_box(out.state);
    return out;
}

}  // namespace ergosense
