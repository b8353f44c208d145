#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "ergosense/errors.hpp"
#include "ergosense/esac.hpp"
#include "ergosense/target.hpp"
#include "oracles.hpp"

using namespace ergosense;

namespace {

// Independent form of the pointwise switching objective.
double objective_oracle(const Vec& v, const Vec& u, const Vec& u0, double alpha, const Vec& r) {
    double sens = 0.0, reg = 0.0;
    for (int i = 0; i < u.size(); ++i) {
        sens += v(i) * (u(i) - u0(i));
        reg += r(i) * u(i) * u(i);
    }
    return 0.5 * ((sens - alpha) * (sens - alpha) + reg);
}

StateVec random_rho(std::mt19937_64& gen, int n, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    StateVec r(2 * n);
    for (int i = 0; i < 2 * n; ++i) r(i) = u(gen);
    return r;
}

}  // namespace

TEST(EsacParams, DefaultsAndValidation) {
    const auto p = EsacParams::for_dimension(3);
    EXPECT_EQ(p.r_diag.size(), 3);
    EXPECT_EQ(p.horizon_steps(), 80);
    EXPECT_EQ(p.schedule_steps(), 5);
    EXPECT_NO_THROW(p.validate(3));
    auto bad = p;
    bad.alpha_d = 1.0;
    EXPECT_THROW(bad.validate(3), ValidationError);
    bad = p;
    bad.horizon = 0.04;
    EXPECT_THROW(bad.validate(3), ValidationError);
    bad = p;
    bad.r_diag(1) = 0.0;
    EXPECT_THROW(bad.validate(3), ValidationError);
}

TEST(Predict, StationaryAndStraightLine) {
    const auto p = EsacParams::for_dimension(2);
    const auto still = predict({make_vec({0.4, 0.6}), make_vec({0.0, 0.0})}, p);
    ASSERT_EQ(still.states.size(), 81u);
    ASSERT_EQ(still.midpoints.size(), 80u);
    for (const auto& s : still.states) EXPECT_EQ(s.pos, make_vec({0.4, 0.6}));
    const auto line = predict({make_vec({0.2, 0.5}), make_vec({0.1, 0.0})}, p, 3.0);
    EXPECT_EQ(line.t0, 3.0);
    for (std::size_t i = 0; i < line.states.size(); ++i) {
        EXPECT_NEAR(line.states[i].pos(0), 0.2 + 0.1 * i * p.dt, 1e-12);
        EXPECT_EQ(line.states[i].pos(1), 0.5);
    }
}

TEST(Predict, LeavingTheBoxMatchesSimulatorWallRule) {
    const auto p = EsacParams::for_dimension(2);
    SensorState s{make_vec({0.9, 0.5}), make_vec({0.5, 0.2})};
    const auto traj = predict(s, p);
    for (int i = 0; i < p.horizon_steps(); ++i) {
        s = rk4_step(s, p.u_default, p.dt);
        clamp_to_box(s);
        EXPECT_NEAR((traj.states[i + 1].pos - s.pos).norm(), 0.0, 1e-12);
        EXPECT_NEAR((traj.states[i + 1].vel - s.vel).norm(), 0.0, 1e-12);
    }
    EXPECT_EQ(traj.states.back().vel(0), 0.0);
}

TEST(Adjoint, TerminalIsZeroAndMatchedCoefficientsGiveZero) {
    const auto p = EsacParams::for_dimension(2);
    const ModeSet modes(2, 6);
    const Vec x0 = make_vec({0.3, 0.7});
    const TrajectoryCoeffs history(modes, x0);
    DistributionCoeffs phi;
    phi.phi.resize(modes.size());
    modes.basis_all(x0, phi.phi);
    const auto traj = predict({x0, make_vec({0.0, 0.0})}, p);
    const auto rho = adjoint_sweep(traj, history, phi, modes, p);
    ASSERT_EQ(rho.size(), traj.states.size());
    for (const auto& r : rho) EXPECT_LT(r.norm(), 1e-12);

    const auto uniform = uniform_target(GridSpec(2, 32), modes);
    const auto moving = predict({x0, make_vec({0.2, -0.1})}, p);
    const auto rho2 = adjoint_sweep(moving, history, uniform.coeffs, modes, p);
    EXPECT_EQ(rho2.back().norm(), 0.0);
    EXPECT_GT(rho2.front().norm(), 0.0);
}

TEST(Action, ZeroAdjointGivesZeroControl) {
    const auto p = EsacParams::for_dimension(2);
    const ControlInput u = optimal_action(StateVec::Zero(4), p);
    EXPECT_EQ(u.norm(), 0.0);
}

TEST(Action, ClosedFormWhenInsideBox) {
    auto p = EsacParams::for_dimension(2);
    p.u_default = make_vec({0.3, -0.2});
    StateVec rho(4);
    rho << 0.0, 0.0, 1.5e-4, -1e-4;
    const Vec v = rho.tail(2);
    Eigen::Matrix2d m = v * v.transpose();
    m(0, 0) += 0.01;
    m(1, 1) += 0.01;
    const Eigen::Vector2d expect = m.inverse() * (v * v.transpose() * p.u_default + v * p.alpha_d);
    const ControlInput u = optimal_action(rho, p);
    ASSERT_LT(expect.cwiseAbs().maxCoeff(), p.u_max);
    EXPECT_NEAR(u(0), expect(0), 1e-10);
    EXPECT_NEAR(u(1), expect(1), 1e-10);
}

TEST(Action, SmallAdjointAsymptotics) {
    const auto p = EsacParams::for_dimension(2);
    std::mt19937_64 gen(4);
    for (int i = 0; i < 20; ++i) {
        const StateVec rho = random_rho(gen, 2, 1e-5);
        const Vec approx = (rho.tail(2).array() * p.alpha_d / p.r_diag.array()).matrix();
        const ControlInput u = optimal_action(rho, p);
        EXPECT_LT((u - approx).norm(), 0.01 * approx.norm());
    }
}

TEST(Action, BeatsGridSearch) {
    auto p = EsacParams::for_dimension(2);
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double scale = std::pow(10.0, -4.0 + 4.0 * (0.5 + 0.5 * unit(gen)));
        const StateVec rho = random_rho(gen, 2, scale);
        p.u_default = make_vec({2.0 * unit(gen), 2.0 * unit(gen)});
        const ControlInput u = optimal_action(rho, p);
        ASSERT_LE(u.cwiseAbs().maxCoeff(), p.u_max);
        const Vec v = rho.tail(2);
        double best = std::numeric_limits<double>::infinity();
        for (int a = 0; a <= 100; ++a) {
            for (int b = 0; b <= 100; ++b) {
                const Vec g = make_vec({-p.u_max + a * 0.2, -p.u_max + b * 0.2});
                best = std::min(best, objective_oracle(v, g, p.u_default, p.alpha_d, p.r_diag));
            }
        }
        EXPECT_LE(objective_oracle(v, u, p.u_default, p.alpha_d, p.r_diag), best + 1e-6) << trial;
        EXPECT_NEAR(action_objective(rho, u, p), objective_oracle(v, u, p.u_default, p.alpha_d, p.r_diag), 1e-9);
    }
}

TEST(Action, ThreeDimensionalBoxOptimum) {
    auto p = EsacParams::for_dimension(3);
    std::mt19937_64 gen(21);
    for (int trial = 0; trial < 10; ++trial) {
        const StateVec rho = random_rho(gen, 3, 0.05);
        const ControlInput u = optimal_action(rho, p);
        const Vec v = rho.tail(3);
        double best = std::numeric_limits<double>::infinity();
        for (int a = 0; a <= 40; ++a)
            for (int b = 0; b <= 40; ++b)
                for (int c = 0; c <= 40; ++c) {
                    const Vec g = make_vec({-10.0 + a * 0.5, -10.0 + b * 0.5, -10.0 + c * 0.5});
                    best = std::min(best, objective_oracle(v, g, p.u_default, p.alpha_d, p.r_diag));
                }
        EXPECT_LE(objective_oracle(v, u, p.u_default, p.alpha_d, p.r_diag), best + 1e-9);
    }
}

TEST(EsacStep, ScheduleShapeAndNonDegenerateStart) {
    const auto p = EsacParams::for_dimension(2);
    const ModeSet modes(2, 10);
    const auto target = uniform_target(GridSpec(2, 64), modes);
    const Vec x0 = make_vec({0.5 + 1e-6, 0.5 - 1e-6});
    const TrajectoryCoeffs history(modes, x0);
    const auto schedule = esac_step({x0, make_vec({0.0, 0.0})}, 2.0, history, target.coeffs, modes, p);
    ASSERT_EQ(schedule.controls.size(), 5u);
    ASSERT_EQ(schedule.times.size(), 5u);
    EXPECT_NEAR(schedule.times[4], 2.04, 1e-12);
    double total = 0.0;
    for (const auto& u : schedule.controls) {
        EXPECT_LE(u.cwiseAbs().maxCoeff(), p.u_max);
        total += u.norm();
    }
    EXPECT_GT(total, 0.0);
}

TEST(EsacStep, FrozenUniformTargetReducesMetric) {
    const auto p = EsacParams::for_dimension(2);
    const ModeSet modes(2, 10);
    const auto target = uniform_target(GridSpec(2, 64), modes);
    const World world(2);
    SensorState s{make_vec({0.3, 0.6}), make_vec({0.0, 0.0})};
    TrajectoryCoeffs c(modes, s.pos);
    std::vector<double> metric;
    for (int it = 0; it < 20 * 20; ++it) {
        if (it % 100 == 0) metric.push_back(ergodic_metric(c, target.coeffs, modes));
        const auto schedule = esac_step(s, it * p.sample_time, c, target.coeffs, modes, p);
        for (const auto& u : schedule.controls) {
            s = resolve_collision(s, rk4_step(s, u, p.dt), world).state;
            c.add_sample(modes, s.pos, p.dt);
        }
    }
    metric.push_back(ergodic_metric(c, target.coeffs, modes));
    // E(t + 10 s) < E(t) over the run.
    EXPECT_LT(metric[2], metric[0]);
    EXPECT_LT(metric[4], metric[2]);
}

TEST(Adjoint, ModeInsertionMatchesFiniteDifference) {
    const auto p = EsacParams::for_dimension(2);
    const ModeSet modes(2, 6);
    std::mt19937_64 gen(17);
    int good = 0;
    for (int i = 0; i < 20; ++i) {
        const auto c = oracle::mode_insertion_case(gen, modes, p);
        if (c.relative_error() < 0.05) ++good;
    }
    EXPECT_GE(good, 19);
}
