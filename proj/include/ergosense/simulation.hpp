#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ergosense/dataset.hpp"
#include "ergosense/grid.hpp"
#include "ergosense/metrics.hpp"
#include "ergosense/scenario.hpp"

namespace ergosense {

struct TrajectoryRow {
    double t = 0.0;
    Vec pos;
    Vec vel;
    Vec u;

    bool operator==(const TrajectoryRow&) const = default;
};

// Snapshot of the estimate and the exploration target on the planning grid.
// `posterior` and `level` are empty until the first successful fit.
struct PosteriorSnapshot {
    double t = 0.0;
    GridSpec grid;
    std::string estimate = "none";  // none | svm | gp
    std::vector<double> target;
    std::vector<double> posterior;
    std::vector<double> level;

    bool operator==(const PosteriorSnapshot&) const = default;
};

struct TrialSummary {
    std::uint64_t trial = 0;
    std::string policy;
    Vec initial_position;
    std::optional<double> first_contact_time;
    // Per shape, the first time a contact measurement detected it.
    std::vector<std::optional<double>> detection_times;
    std::optional<double> all_detected_time;
    int detection_count = 0;
    double final_ergodic = 0.0;
    double final_gamma = 0.0;
    std::optional<double> final_area_error;
    std::size_t contacts = 0;
    std::size_t measurements = 0;
    std::size_t fits = 0;
    double wall_seconds = 0.0;
    std::string error;  // non-empty when the trial aborted
};

struct RunOutputs {
    std::vector<TrajectoryRow> trajectory;
    Dataset measurements;
    std::vector<PosteriorSnapshot> snapshots;
    MetricsLog metrics;
    TrialSummary summary;
    std::shared_ptr<const ShapeEstimate> final_estimate;  // null if never fitted
};

// Initial position for a trial: the scenario's own when `use_fixed` and set,
// otherwise uniform in the box and outside every shape. A 1e-6 offset in a
// random direction breaks symmetric ties in either case.
Vec initial_position(const Scenario& scenario, const World& world, Rng& rng, bool use_fixed);

// One closed-loop run. Deterministic in (scenario, trial).
RunOutputs run_trial(const Scenario& scenario, std::uint64_t trial, bool use_fixed_start = true);

struct BatchResult {
    std::string scenario;
    std::string policy;
    std::vector<TrialSummary> trials;
};

using ProgressFn = std::function<void(const TrialSummary&)>;

// Trials 0..count-1 from random starts. A failing trial is recorded with its
// error and the batch continues.
BatchResult run_batch(const Scenario& scenario, int count, Policy policy, const ProgressFn& progress = {});

}  // namespace ergosense
