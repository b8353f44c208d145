#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ergosense/dynamics.hpp"
#include "ergosense/errors.hpp"

using namespace ergosense;

TEST(Flow, DoubleIntegrator) {
    const SensorState s{make_vec({0.1, 0.2}), make_vec({0.3, -0.4})};
    const StateVec f = flow(s, make_vec({1.5, 2.5}));
    ASSERT_EQ(f.size(), 4);
    EXPECT_EQ(f(0), 0.3);
    EXPECT_EQ(f(1), -0.4);
    EXPECT_EQ(f(2), 1.5);
    EXPECT_EQ(f(3), 2.5);
}

TEST(Flow, LinearInControl) {
    const SensorState s{make_vec({0.1, 0.2, 0.3}), make_vec({0.3, -0.4, 0.1})};
    const Vec u1 = make_vec({1.0, -2.0, 0.5});
    const Vec u2 = make_vec({0.25, 4.0, -3.0});
    const StateVec lhs = flow(s, Vec(2.0 * u1 + 3.0 * u2));
    const StateVec g = flow(s, Vec::Zero(3));
    StateVec rhs = g;
    rhs.tail(3) += 2.0 * u1 + 3.0 * u2;
    EXPECT_EQ((lhs - rhs).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Rk4, ExactForConstantAcceleration) {
    const SensorState s{make_vec({0.1, 0.2}), make_vec({0.3, -0.4})};
    const Vec u = make_vec({2.0, -1.0});
    const double dt = 0.05;
    const SensorState n = rk4_step(s, u, dt);
    for (int i = 0; i < 2; ++i) {
        EXPECT_NEAR(n.pos(i), s.pos(i) + s.vel(i) * dt + 0.5 * u(i) * dt * dt, 1e-15);
        EXPECT_NEAR(n.vel(i), s.vel(i) + u(i) * dt, 1e-15);
    }
}

TEST(Rk4, ConstantSpeedWithoutControl) {
    const SensorState s{make_vec({0.4, 0.4}), make_vec({0.7, -0.2})};
    const SensorState n = rk4_step(s, Vec::Zero(2), 0.01);
    EXPECT_NEAR(n.vel.norm(), s.vel.norm(), 1e-12);
}

TEST(Rk4, RejectsBadStep) {
    const SensorState s{make_vec({0.4, 0.4}), make_vec({0.0, 0.0})};
    EXPECT_THROW(rk4_step(s, Vec::Zero(2), 0.0), std::invalid_argument);
}

TEST(Saturate, ClampsAndIsIdempotent) {
    EXPECT_EQ(saturate(make_vec({0.5, -0.5}), 1.0), make_vec({0.5, -0.5}));
    EXPECT_EQ(saturate(make_vec({20.0, -20.0}), 10.0), make_vec({10.0, -10.0}));
    const Vec once = saturate(make_vec({3.0, -7.0, 12.0}), 5.0);
    EXPECT_EQ(saturate(once, 5.0), once);
    EXPECT_THROW(saturate(make_vec({1.0, 1.0}), 0.0), std::invalid_argument);
}

TEST(Walls, ClampZeroesOutwardVelocity) {
    SensorState s{make_vec({1.2, 0.5}), make_vec({2.0, 1.0})};
    EXPECT_TRUE(clamp_to_box(s));
    EXPECT_LE(s.pos(0), 1.0);
    EXPECT_GE(s.pos(0), 1.0 - 1e-3);
    EXPECT_EQ(s.vel(0), 0.0);
    EXPECT_EQ(s.vel(1), 1.0);
    SensorState inside{make_vec({0.5, 0.5}), make_vec({2.0, 1.0})};
    EXPECT_FALSE(clamp_to_box(inside));
}

TEST(Collision, NoShapesNoContact) {
    const World world(2);
    const SensorState a{make_vec({0.2, 0.2}), make_vec({1.0, 0.0})};
    const SensorState b{make_vec({0.3, 0.2}), make_vec({1.0, 0.0})};
    const auto r = resolve_collision(a, b, world);
    EXPECT_FALSE(r.contact);
    EXPECT_EQ(r.state.pos, b.pos);
}

TEST(Collision, HeadOnCircleMatchesLineIntersection) {
    // Segment (0.2,0.5) -> (0.45,0.5) against the circle centred at (0.5,0.5), r = 0.2:
    // the line meets the circle at x = 0.5 - 0.2.
    const World world(2, {make_circle(make_vec({0.5, 0.5}), 0.2)});
    const SensorState a{make_vec({0.2, 0.5}), make_vec({2.5, 0.0})};
    const SensorState b{make_vec({0.45, 0.5}), make_vec({2.5, 0.0})};
    const auto r = resolve_collision(a, b, world, 1.0, 0.1);
    ASSERT_TRUE(r.contact);
    EXPECT_NEAR(r.contact->point(0), 0.3, 1e-6);
    EXPECT_NEAR(r.contact->point(1), 0.5, 1e-12);
    EXPECT_NEAR(r.state.pos(0), 0.3, 1e-6);
    EXPECT_NEAR(r.state.vel(0), 0.0, 1e-12);
    EXPECT_NEAR(r.contact->time, 1.0 + 0.1 * (0.1 / 0.25), 1e-6);
    EXPECT_EQ(r.contact->shape_id, 0);
    EXPECT_LE(std::abs(world.shapes()[0].boundary_value(r.contact->point)), kContactTolerance);
}

TEST(Collision, GrazingSegmentHasNoContact) {
    // Horizontal line y = 0.5 + 0.2 + 1e-4 passes just above the circle.
    const World world(2, {make_circle(make_vec({0.5, 0.5}), 0.2)});
    const SensorState a{make_vec({0.3, 0.7001}), make_vec({1.0, 0.0})};
    const SensorState b{make_vec({0.7, 0.7001}), make_vec({1.0, 0.0})};
    const auto r = resolve_collision(a, b, world);
    EXPECT_FALSE(r.contact);
    EXPECT_EQ(r.state.pos, b.pos);
}

TEST(Collision, SlidesAlongFlatFace) {
    // Diagonal step into the left face of a square keeps the tangential motion.
    const World world(2, {make_square(make_vec({0.5, 0.5}), 0.1)});
    const SensorState a{make_vec({0.39, 0.45}), make_vec({1.0, 1.0})};
    const SensorState b{make_vec({0.41, 0.47}), make_vec({1.0, 1.0})};
    const auto r = resolve_collision(a, b, world);
    ASSERT_TRUE(r.contact);
    EXPECT_NEAR(r.contact->point(0), 0.4, 1e-6);
    EXPECT_NEAR(r.contact->point(1), 0.46, 1e-6);
    EXPECT_NEAR(r.state.pos(0), 0.4, 1e-6);
    EXPECT_NEAR(r.state.pos(1), 0.47, 1e-6);
    EXPECT_NEAR(r.state.vel(0), 0.0, 1e-6);
    EXPECT_NEAR(r.state.vel(1), 1.0, 1e-12);
}

TEST(Collision, StartingInsideIsAnInvariantViolation) {
    const World world(2, {make_circle(make_vec({0.5, 0.5}), 0.2)});
    const SensorState a{make_vec({0.5, 0.5}), make_vec({0.0, 0.0})};
    EXPECT_THROW(resolve_collision(a, a, world), InvariantViolation);
}

TEST(Collision, RandomWalkStaysOutsideAndInBox) {
    const World world(2, {make_circle(make_vec({0.3, 0.3}), 0.12), make_square(make_vec({0.7, 0.65}), 0.12, 0.4),
                          make_triangle(make_vec({0.3, 0.75}), 0.15)});
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    SensorState s{make_vec({0.55, 0.2}), make_vec({0.0, 0.0})};
    for (int i = 0; i < 20000; ++i) {
        const Vec control = make_vec({u(gen), u(gen)});
        const auto r = resolve_collision(s, rk4_step(s, control, 0.01), world, i * 0.01, 0.01);
        s = r.state;
        ASSERT_TRUE(in_unit_box(s.pos));
        for (const auto& shape : world.shapes()) ASSERT_GE(shape.boundary_value(s.pos), -kContactTolerance);
        if (r.contact) {
            ASSERT_LE(std::abs(world.shapes()[r.contact->shape_id].boundary_value(r.contact->point)),
                      kContactTolerance);
        }
    }
}
