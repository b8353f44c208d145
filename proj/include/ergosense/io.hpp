#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "ergosense/simulation.hpp"

namespace ergosense {

// Shortest round-trip decimal form.
std::string format_double(double v);
double parse_double(const std::string& s);

// trajectory.csv: t,x,y[,z],vx,vy[,vz],ux,uy[,uz]
void write_trajectory(std::ostream& os, const std::vector<TrajectoryRow>& rows, int dim);
std::vector<TrajectoryRow> read_trajectory(std::istream& is);

// measurements.csv: t,x,y[,z],label
void write_measurements(std::ostream& os, const Dataset& data, int dim);
Dataset read_measurements(std::istream& is);

// Posterior snapshot: a '#' metadata line, a column header, then one row per
// grid cell in x-fastest order. Columns are target,posterior,level, or target
// alone before the first fit.
void write_snapshot(std::ostream& os, const PosteriorSnapshot& snap);
PosteriorSnapshot read_snapshot(std::istream& is);
std::string snapshot_filename(const PosteriorSnapshot& snap);

nlohmann::json metrics_to_json(const MetricsLog& log);
MetricsLog metrics_from_json(const nlohmann::json& j);

nlohmann::json summary_to_json(const TrialSummary& s);
TrialSummary summary_from_json(const nlohmann::json& j);

nlohmann::json batch_to_json(const std::vector<BatchResult>& batches);

// Writes trajectory.csv, measurements.csv, posterior_*.csv, metrics.json,
// summary.json and config.json into `dir` (created if missing).
void write_run(const std::filesystem::path& dir, const Scenario& scenario, const RunOutputs& run);

}  // namespace ergosense
