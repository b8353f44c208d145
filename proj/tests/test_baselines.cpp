#include <cmath>

#include <gtest/gtest.h>

#include "ergosense/errors.hpp"
#include "ergosense/geer.hpp"
#include "ergosense/metrics.hpp"

using namespace ergosense;

TEST(Geer, WaypointInsideBallAndBox) {
    GeerParams p;
    Rng rng(4);
    for (const Vec& pos : {make_vec({0.5, 0.5}), make_vec({0.01, 0.99})}) {
        for (int i = 0; i < 50; ++i) {
            const Vec w = select_waypoint(pos, nullptr, p, rng);
            EXPECT_TRUE(in_unit_box(w));
            EXPECT_LE((w - pos).norm(), p.radius + 1e-12);
        }
    }
}

TEST(Geer, PrefersHighPosterior) {
    // A classifier with a single collision support point at (0.6, 0.5).
    KernelModel m;
    m.support_points = {make_vec({0.6, 0.5})};
    m.alphas = {1.0};
    m.labels = {1};
    m.bias = 0.0;
    m.sigma = 0.05;
    PlattCalibration calib;
    calib.A = 5.0;
    calib.B = 0.0;
    const ShapeEstimate est(ShapeEstimate::Svm{m, calib});
    GeerParams p;
    Rng rng(9);
    const Vec pos = make_vec({0.5, 0.5});
    double mean_dx = 0.0;
    for (int i = 0; i < 20; ++i) mean_dx += select_waypoint(pos, &est, p, rng)(0) - 0.5;
    EXPECT_GT(mean_dx / 20, 0.05);
}

TEST(Geer, ControlSaturatedPd) {
    GeerParams p;
    const SensorState s{make_vec({0.5, 0.5}), make_vec({0.0, 0.0})};
    const Vec u = waypoint_control(s, make_vec({0.9, 0.5}), p);
    EXPECT_NEAR(u(0), 10.0, 1e-12);  // 40 * 0.4 = 16, saturated
    EXPECT_NEAR(u(1), 0.0, 1e-12);
    const SensorState moving{make_vec({0.5, 0.5}), make_vec({0.1, 0.0})};
    const Vec u2 = waypoint_control(moving, make_vec({0.55, 0.5}), p);
    EXPECT_NEAR(u2(0), 40.0 * 0.05 - 12.0 * 0.1, 1e-12);
}

TEST(Geer, ReplansOnReachOrTimeout) {
    GeerParams p;
    GeerPolicy policy(p);
    Rng rng(1);
    const SensorState s{make_vec({0.5, 0.5}), make_vec({0.0, 0.0})};
    policy.step(s, 0.0, nullptr, rng);
    ASSERT_TRUE(policy.waypoint());
    const Vec first = *policy.waypoint();
    policy.step(s, 0.1, nullptr, rng);
    if ((first - s.pos).norm() > p.reach_tolerance) EXPECT_EQ(*policy.waypoint(), first);
    policy.step(s, 0.6, nullptr, rng);
    EXPECT_NE(*policy.waypoint(), first);
    const SensorState there{first, make_vec({0.0, 0.0})};
    GeerPolicy fresh(p);
    Rng rng2(1);
    fresh.step(s, 0.0, nullptr, rng2);
    fresh.step(there, 0.01, nullptr, rng2);
    EXPECT_NE(*fresh.waypoint(), first);
}

TEST(Metrics, GammaAndAreaError) {
    const GridSpec grid(2, 4);
    std::vector<std::uint8_t> truth(16, 0), est(16, 0);
    truth[5] = truth[6] = 1;
    est[6] = est[7] = est[8] = 1;
    EXPECT_NEAR(gamma_metric(est, truth, grid), 3.0 / 16.0, 1e-15);
    EXPECT_NEAR(gamma_metric(truth, truth, grid), 0.0, 1e-15);
    EXPECT_NEAR(area_error(est, truth, grid), 0.5, 1e-15);
    EXPECT_THROW(area_error(est, std::vector<std::uint8_t>(16, 0), grid), std::invalid_argument);
}

TEST(Metrics, EmptyEstimateMask) {
    const GridSpec grid(2, 8);
    const auto m = estimate_mask(nullptr, grid);
    EXPECT_EQ(m.size(), grid.size());
    for (auto v : m) EXPECT_EQ(v, 0);
}

TEST(Metrics, Detection) {
    const World world(2, {make_circle(make_vec({0.25, 0.5}), 0.1), make_circle(make_vec({0.75, 0.5}), 0.1)});
    Dataset d = {{0.0, make_vec({0.35, 0.5}), 1}, {1.0, make_vec({0.5, 0.5}), 0}};
    EXPECT_EQ(detection_count(d, world), 1);
    d.push_back({2.0, make_vec({0.75, 0.6 + 2e-6}), 1});
    EXPECT_EQ(detection_count(d, world), 2);
    const auto flags = detected_shapes(d, world);
    EXPECT_TRUE(flags[0]);
    EXPECT_TRUE(flags[1]);
    const Dataset far = {{0.0, make_vec({0.75, 0.62}), 1}};
    EXPECT_EQ(detection_count(far, world), 0);
}

TEST(Metrics, LogRequiresIncreasingTime) {
    MetricsLog log;
    log.append({0.0, 1.0, 0.1, std::nullopt, {}});
    log.append({0.5, 1.0, 0.1, 0.2, {}});
    EXPECT_THROW(log.append({0.5, 1.0, 0.1, 0.2, {}}), std::invalid_argument);
    EXPECT_EQ(log.rows().size(), 2u);
}
