#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "ergosense/errors.hpp"
#include "ergosense/io.hpp"
#include "ergosense/scenario.hpp"
#include "ergosense/simulation.hpp"

using namespace ergosense;
using nlohmann::json;

namespace {

json minimal_square() {
    std::ifstream f(std::filesystem::path(ERGOSENSE_SCENARIO_DIR) / "minimal_square.json");
    return json::parse(f);
}

std::string read_all(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::filesystem::path temp_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("ergosense_test_" + name);
    std::filesystem::remove_all(p);
    return p;
}

}  // namespace

TEST(Scenario, MinimalFillsDefaults) {
    const Scenario s = parse_scenario(minimal_square());
    EXPECT_EQ(s.dimension, 2);
    EXPECT_EQ(s.k_max, 10);
    EXPECT_EQ(s.grid, 64);
    EXPECT_EQ(s.esac.q, 30.0);
    EXPECT_EQ(s.esac.horizon, 0.8);
    EXPECT_EQ(s.esac.alpha_d, -555.0);
    EXPECT_EQ(s.esac.dt, 0.01);
    EXPECT_EQ(s.esac.sample_time, 0.05);
    EXPECT_EQ(s.esac.u_max, 10.0);
    EXPECT_EQ(s.estimator.sigma, 0.08);
    EXPECT_EQ(s.estimator.C, 10.0);
    EXPECT_EQ(s.estimator.caps.contact_cap, 400u);
    EXPECT_EQ(s.estimator.caps.free_cap, 1600u);
    EXPECT_EQ(s.output.metrics_grid, 128);
    EXPECT_EQ(s.policy, Policy::Esac);
    EXPECT_EQ(s.world.size(), 1u);

    json three = json::parse(R"({"dimension": 3, "duration": 1.0,
        "world": [{"kind": "torus", "center": [0.5, 0.5, 0.5], "major_radius": 0.25, "minor_radius": 0.08}]})");
    const Scenario t = parse_scenario(three);
    EXPECT_EQ(t.k_max, 6);
    EXPECT_EQ(t.grid, 32);
    EXPECT_EQ(t.esac.r_diag.size(), 3);
}

TEST(Scenario, DefaultSnapshotTimes) {
    json j = minimal_square();
    j.erase("output");
    const Scenario s = parse_scenario(j);
    EXPECT_EQ(s.output.snapshot_times, (std::vector<double>{0.1, 1.0, 2.0, 6.0, 11.0, 30.0}));
}

TEST(Scenario, RejectsUnknownKeysWithPath) {
    json j = minimal_square();
    j["esac"] = {{"qq", 3.0}};
    try {
        parse_scenario(j);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.field(), "esac.qq");
    }
    json k = minimal_square();
    k["world"][0]["radius"] = 0.1;  // squares take half_width
    try {
        parse_scenario(k);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.field(), "world[0].radius");
    }
    json l = minimal_square();
    l["colour"] = "red";
    EXPECT_THROW(parse_scenario(l), ValidationError);
}

TEST(Scenario, ValidationFieldPaths) {
    auto field_of = [](const json& j) {
        try {
            parse_scenario(j);
        } catch (const ValidationError& e) {
            return e.field();
        }
        return std::string("<none>");
    };
    json a = minimal_square();
    a["dynamics"] = {{"sample_time", 0.033}};
    EXPECT_EQ(field_of(a), "dynamics.sample_time");
    json b = minimal_square();
    b["initial_position"] = {0.5, 0.5};
    EXPECT_EQ(field_of(b), "initial_position");
    json c = minimal_square();
    c["world"][0]["half_width"] = -1.0;
    EXPECT_EQ(field_of(c), "world[0].half_width");
    json d = minimal_square();
    d["estimator"] = {{"representation", "tree"}};
    EXPECT_EQ(field_of(d), "estimator.representation");
    json e = minimal_square();
    e["dimension"] = 4;
    EXPECT_EQ(field_of(e), "dimension");
    json g = minimal_square();
    g["duration"] = -1.0;
    EXPECT_EQ(field_of(g), "duration");
    json h = minimal_square();
    h["esac"] = {{"R", {0.01, 0.0}}};
    EXPECT_EQ(field_of(h), "esac.R");
    json f = minimal_square();
    f["world"].push_back({{"kind", "circle"}, {"center", {0.55, 0.5}}, {"radius", 0.1}});
    EXPECT_EQ(field_of(f).rfind("world[", 0), 0u);
}

TEST(Scenario, EchoRoundTrips) {
    const Scenario s = parse_scenario(minimal_square());
    const json echo = scenario_to_json(s);
    const Scenario again = parse_scenario(echo);
    EXPECT_EQ(scenario_to_json(again), echo);
}

TEST(Scenario, ShippedFixturesAreValid) {
    for (const auto& entry : std::filesystem::directory_iterator(ERGOSENSE_SCENARIO_DIR)) {
        if (entry.path().extension() != ".json") continue;
        EXPECT_NO_THROW(load_scenario(entry.path())) << entry.path();
    }
    EXPECT_THROW(load_scenario("/nonexistent/scenario.json"), ValidationError);
}

TEST(Io, FormatRoundTrip) {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(gen) * std::pow(10.0, static_cast<int>(u(gen)) % 30);
        EXPECT_EQ(parse_double(format_double(v)), v);
    }
    EXPECT_THROW(parse_double("1.5x"), std::runtime_error);
}

TEST(Io, TrajectoryAndMeasurementsRoundTrip) {
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int dim : {2, 3}) {
        std::vector<TrajectoryRow> rows;
        Dataset data;
        for (int i = 0; i < 50; ++i) {
            Vec a(dim), b(dim), c(dim);
            for (int d = 0; d < dim; ++d) {
                a(d) = u(gen);
                b(d) = u(gen) - 0.5;
                c(d) = 20 * u(gen) - 10;
            }
            rows.push_back({i * 0.01, a, b, c});
            data.push_back({i * 0.013, a, i % 3 == 0});
        }
        std::stringstream ts, ms;
        write_trajectory(ts, rows, dim);
        write_measurements(ms, data, dim);
        EXPECT_EQ(read_trajectory(ts), rows);
        const Dataset back = read_measurements(ms);
        ASSERT_EQ(back.size(), data.size());
        for (std::size_t i = 0; i < data.size(); ++i) {
            EXPECT_EQ(back[i].time, data[i].time);
            EXPECT_EQ(back[i].location, data[i].location);
            EXPECT_EQ(back[i].label, data[i].label);
        }
    }
}

TEST(Io, SnapshotRoundTrip) {
    PosteriorSnapshot snap;
    snap.t = 6.0;
    snap.grid = GridSpec(2, 8);
    snap.estimate = "svm";
    for (std::size_t i = 0; i < snap.grid.size(); ++i) {
        snap.target.push_back(0.1 * i);
        snap.posterior.push_back(1.0 / (1.0 + i));
        snap.level.push_back(-0.3 + 0.01 * i);
    }
    std::stringstream ss;
    write_snapshot(ss, snap);
    EXPECT_EQ(ss.str().rfind("# posterior", 0), 0u);
    EXPECT_EQ(read_snapshot(ss), snap);

    PosteriorSnapshot bare;
    bare.t = 0.1;
    bare.grid = GridSpec(3, 4);
    bare.target.assign(bare.grid.size(), 1.0);
    std::stringstream bs;
    write_snapshot(bs, bare);
    EXPECT_EQ(read_snapshot(bs), bare);
}

TEST(Io, MetricsAndSummaryRoundTrip) {
    MetricsLog log;
    log.append({0.0, 1.5, 0.09, std::nullopt, {false, false}});
    log.append({0.05, 1.25, 0.081, 0.75, {true, false}});
    EXPECT_EQ(metrics_from_json(json::parse(metrics_to_json(log).dump())), log);

    TrialSummary s;
    s.trial = 3;
    s.policy = "geer";
    s.initial_position = make_vec({0.1, 0.2});
    s.detection_times = {1.5, std::nullopt};
    s.detection_count = 1;
    s.final_gamma = 0.01;
    s.error = "boom";
    const TrialSummary back = summary_from_json(json::parse(summary_to_json(s).dump()));
    EXPECT_EQ(back.trial, 3u);
    EXPECT_EQ(back.detection_times, s.detection_times);
    EXPECT_EQ(back.error, "boom");
    EXPECT_EQ(back.initial_position, s.initial_position);
}

TEST(Simulation, ShortRunProducesConsistentOutputs) {
    const Scenario s = parse_scenario(minimal_square());
    const auto run = run_trial(s, 0);
    EXPECT_TRUE(run.summary.error.empty()) << run.summary.error;
    EXPECT_EQ(run.trajectory.size(), 301u);
    EXPECT_EQ(run.snapshots.size(), 3u);
    EXPECT_EQ(run.metrics.rows().size(), 61u);
    for (const auto& r : run.trajectory) ASSERT_TRUE(in_unit_box(r.pos));
    for (std::size_t i = 1; i < run.measurements.size(); ++i) {
        ASSERT_LE(run.measurements[i - 1].time, run.measurements[i].time);
    }
    int last = 0;
    for (const auto& row : run.metrics.rows()) {
        int count = 0;
        for (bool b : row.detected) count += b;
        EXPECT_GE(count, last);
        last = count;
    }
}

TEST(Simulation, DeterministicOutputs) {
    const Scenario s = parse_scenario(minimal_square());
    const auto a = temp_dir("det_a");
    const auto b = temp_dir("det_b");
    write_run(a, s, run_trial(s, 5));
    write_run(b, s, run_trial(s, 5));
    for (const char* f : {"metrics.json", "trajectory.csv", "measurements.csv", "config.json"}) {
        EXPECT_EQ(read_all(a / f), read_all(b / f)) << f;
    }
    const auto c = temp_dir("det_c");
    write_run(c, s, run_trial(s, 6));
    EXPECT_NE(read_all(a / "trajectory.csv"), read_all(c / "trajectory.csv"));
}

TEST(Simulation, WrittenFilesReadBack) {
    const Scenario s = parse_scenario(minimal_square());
    const auto run = run_trial(s, 1);
    const auto dir = temp_dir("readback");
    write_run(dir, s, run);
    std::ifstream tf(dir / "trajectory.csv");
    EXPECT_EQ(read_trajectory(tf), run.trajectory);
    std::ifstream mf(dir / "metrics.json");
    EXPECT_EQ(metrics_from_json(json::parse(mf)), run.metrics);
    for (const auto& snap : run.snapshots) {
        std::ifstream sf(dir / snapshot_filename(snap));
        EXPECT_EQ(read_snapshot(sf), snap);
    }
    std::ifstream cf(dir / "config.json");
    json config = json::parse(cf);
    config.erase("trial");
    config.erase("resolved_initial_position");
    EXPECT_NO_THROW(parse_scenario(config));
}

TEST(Simulation, BatchRecordsEveryTrial) {
    json j = minimal_square();
    j["duration"] = 1.0;
    j.erase("initial_position");
    const Scenario s = parse_scenario(j);
    const auto batch = run_batch(s, 3, Policy::Geer);
    ASSERT_EQ(batch.trials.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(batch.trials[i].trial, i);
        EXPECT_GT(s.build_world().min_value(batch.trials[i].initial_position), 0.0);
    }
    EXPECT_NE(batch.trials[0].initial_position, batch.trials[1].initial_position);
}

TEST(Cli, ExitCodes) {
    const std::string cli = ERGOSENSE_CLI_PATH;
    const auto dir = temp_dir("cli");
    std::filesystem::create_directories(dir);
    json bad = minimal_square();
    bad["bogus"] = 1;
    std::ofstream(dir / "bad.json") << bad.dump();
    json good = minimal_square();
    good["duration"] = 0.5;
    std::ofstream(dir / "good.json") << good.dump();
    auto run = [](const std::string& cmd) {
        const int rc = std::system((cmd + " > /dev/null 2>&1").c_str());
        return WEXITSTATUS(rc);
    };
    EXPECT_EQ(run(cli + " validate " + (dir / "good.json").string()), 0);
    EXPECT_EQ(run(cli + " validate " + (dir / "bad.json").string()), 2);
    EXPECT_EQ(run(cli + " run " + (dir / "good.json").string() + " --out " + (dir / "out").string()), 0);
    EXPECT_TRUE(std::filesystem::exists(dir / "out" / "metrics.json"));
    EXPECT_EQ(run(cli + " batch " + (dir / "good.json").string() + " --trials 2 --policy both --out " +
                  (dir / "batch").string()),
              0);
    std::ifstream bf(dir / "batch" / "summary.json");
    const json summary = json::parse(bf);
    EXPECT_TRUE(summary["policies"].contains("esac"));
    EXPECT_TRUE(summary["policies"].contains("geer"));
    EXPECT_EQ(run(cli + " frobnicate"), 2);
}
