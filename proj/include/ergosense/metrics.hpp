#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ergosense/dataset.hpp"
#include "ergosense/dynamics.hpp"
#include "ergosense/estimator.hpp"
#include "ergosense/grid.hpp"

namespace ergosense {

// Volume of the symmetric difference of two indicator masks.
double gamma_metric(std::span<const std::uint8_t> estimate, std::span<const std::uint8_t> truth,
                    const GridSpec& grid);

// |estimated area - true area| / true area. Throws std::invalid_argument on empty truth.
double area_error(std::span<const std::uint8_t> estimate, std::span<const std::uint8_t> truth,
                  const GridSpec& grid);

inline constexpr double kDetectionTolerance = 10.0 * kContactTolerance;

// Per shape: has some collision measurement within `delta` of its boundary.
std::vector<bool> detected_shapes(const Dataset& data, const World& world, double delta = kDetectionTolerance);
int detection_count(const Dataset& data, const World& world, double delta = kDetectionTolerance);

// Cells where the estimate's level value is <= 0; all false without an estimate.
std::vector<std::uint8_t> estimate_mask(const ShapeEstimate* estimate, const GridSpec& grid);

struct MetricsRow {
    double t = 0.0;
    double ergodic = 0.0;
    double gamma = 0.0;
    std::optional<double> area_error;
    std::vector<bool> detected;

    bool operator==(const MetricsRow&) const = default;
};

class MetricsLog {
public:
    // Throws std::invalid_argument unless t is strictly increasing.
    void append(MetricsRow row);
    const std::vector<MetricsRow>& rows() const { return rows_; }
    bool empty() const { return rows_.empty(); }

    bool operator==(const MetricsLog&) const = default;

private:
    std::vector<MetricsRow> rows_;
};

}  // namespace ergosense
