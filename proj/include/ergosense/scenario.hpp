#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ergosense/esac.hpp"
#include "ergosense/estimator.hpp"
#include "ergosense/geer.hpp"
#include "ergosense/shapes.hpp"

namespace ergosense {

enum class Policy { Esac, Geer };

std::string to_string(Policy p);
Policy policy_from_string(const std::string& name);

struct OutputOptions {
    std::vector<double> snapshot_times;
    double metrics_interval = 0.05;
    int metrics_grid = 128;
};

// One experiment, fully resolved: every field has a value after parsing.
struct Scenario {
    std::string name = "scenario";
    int dimension = 2;
    double duration = 30.0;
    std::uint64_t seed = 0;
    Policy policy = Policy::Esac;
    std::optional<Vec> initial_position;
    std::vector<ShapeSpec> world;

    // dt, sample_time and u_max live in `esac` and are shared with gEER.
    EsacParams esac;
    EstimatorParams estimator;
    int k_max = 10;
    int grid = 64;
    GeerParams geer;
    OutputOptions output;

    World build_world() const;
    // Throws ValidationError with the field path.
    void validate() const;
};

// Parses and validates; unknown keys are rejected. Missing keys take the
// dimension-dependent defaults.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::filesystem::path& path);

// Resolved configuration, suitable for echoing next to run outputs and for
// feeding back into parse_scenario.
nlohmann::json scenario_to_json(const Scenario& s);

}  // namespace ergosense
