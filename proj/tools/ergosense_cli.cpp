#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ergosense/errors.hpp"
#include "ergosense/io.hpp"
#include "ergosense/scenario.hpp"
#include "ergosense/simulation.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

int cmd_run(const std::string& path, std::uint64_t seed, const std::string& out_dir) {
    const ergosense::Scenario scenario = ergosense::load_scenario(path);
    const auto run = ergosense::run_trial(scenario, seed);
    ergosense::write_run(out_dir, scenario, run);
    const auto& s = run.summary;
    std::cout << "scenario " << scenario.name << " trial " << seed << ": " << s.detection_count << "/"
              << scenario.world.size() << " shapes detected, final gamma " << s.final_gamma << ", final E "
              << s.final_ergodic << " (" << s.wall_seconds << " s)\n";
    if (!s.error.empty()) {
        std::cerr << "trial aborted: " << s.error << '\n';
        return kExitRuntime;
    }
    return 0;
}

int cmd_batch(const std::string& path, int trials, const std::string& policy, const std::string& out_dir) {
    const ergosense::Scenario scenario = ergosense::load_scenario(path);
    std::vector<ergosense::Policy> policies;
    if (policy == "both") {
        policies = {ergosense::Policy::Esac, ergosense::Policy::Geer};
    } else {
        policies = {ergosense::policy_from_string(policy)};
    }
    std::vector<ergosense::BatchResult> results;
    for (auto p : policies) {
        results.push_back(ergosense::run_batch(scenario, trials, p, [](const ergosense::TrialSummary& t) {
            std::cout << t.policy << " trial " << t.trial << ": " << t.detection_count << " detected";
            if (t.all_detected_time) std::cout << ", all by " << *t.all_detected_time << " s";
            if (!t.error.empty()) std::cout << ", FAILED: " << t.error;
            std::cout << " (" << t.wall_seconds << " s)\n";
        }));
    }
    std::filesystem::create_directories(out_dir);
    auto doc = ergosense::batch_to_json(results);
    doc["config"] = ergosense::scenario_to_json(scenario);
    std::ofstream(std::filesystem::path(out_dir) / "summary.json") << doc.dump(2) << '\n';
    return 0;
}

int cmd_validate(const std::string& path) {
    const ergosense::Scenario scenario = ergosense::load_scenario(path);
    std::cout << ergosense::scenario_to_json(scenario).dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ergodic active sensing for shape estimation"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    int trials = 10;
    std::string policy = "both";

    auto* run = app.add_subcommand("run", "Run one trial and write its outputs");
    run->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    run->add_option("--seed", seed, "Trial index mixed into the scenario seed");
    run->add_option("--out", out_dir, "Output directory");

    auto* batch = app.add_subcommand("batch", "Run trials from random starts and summarize");
    batch->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    batch->add_option("--trials", trials, "Number of trials")->check(CLI::PositiveNumber);
    batch->add_option("--policy", policy, "Policy to run")->check(CLI::IsMember({"esac", "geer", "both"}));
    batch->add_option("--out", out_dir, "Output directory");

    auto* validate = app.add_subcommand("validate", "Check a scenario and print it with defaults filled in");
    validate->add_option("scenario", scenario_path, "Scenario JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitValidation;
    }

    try {
        if (*run) return cmd_run(scenario_path, seed, out_dir);
        if (*batch) return cmd_batch(scenario_path, trials, policy, out_dir);
        return cmd_validate(scenario_path);
    } catch (const ergosense::ValidationError& e) {
        std::cerr << "invalid scenario: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}
