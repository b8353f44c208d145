#include "ergosense/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace ergosense {

double gamma_metric(std::span<const std::uint8_t> estimate, std::span<const std::uint8_t> truth,
                    const GridSpec& grid) {
    if (estimate.size() != truth.size() || truth.size() != grid.size()) {
        throw std::invalid_argument("gamma_metric: masks are not aligned with the grid");
    }
    std::size_t diff = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) diff += (estimate[i] != 0) != (truth[i] != 0);
    return static_cast<double>(diff) * grid.cell_volume();
}

double area_error(std::span<const std::uint8_t> estimate, std::span<const std::uint8_t> truth,
                  const GridSpec& grid) {
    if (estimate.size() != truth.size() || truth.size() != grid.size()) {
        throw std::invalid_argument("area_error: masks are not aligned with the grid");
    }
    std::size_t est = 0, tru = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        est += estimate[i] != 0;
        tru += truth[i] != 0;
    }
    if (tru == 0) throw std::invalid_argument("area_error: true area is zero");
    return std::abs(static_cast<double>(est) - static_cast<double>(tru)) / static_cast<double>(tru);
}

std::vector<bool> detected_shapes(const Dataset& data, const World& world, double delta) {
    std::vector<bool> hit(world.shapes().size(), false);
    for (const auto& m : data) {
        if (m.label != 1) continue;
        for (std::size_t s = 0; s < hit.size(); ++s) {
            if (!hit[s] && std::abs(world.shapes()[s].boundary_value(m.location)) <= delta) hit[s] = true;
        }
    }
    return hit;
}

int detection_count(const Dataset& data, const World& world, double delta) {
    int n = 0;
    for (bool b : detected_shapes(data, world, delta)) n += b;
    return n;
}

std::vector<std::uint8_t> estimate_mask(const ShapeEstimate* estimate, const GridSpec& grid) {
    std::vector<std::uint8_t> mask(grid.size(), 0);
    if (!estimate) return mask;
    const auto level = estimate->level_grid(grid);
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = level[i] <= 0.0;
    return mask;
}

void MetricsLog::append(MetricsRow row) {
    if (!rows_.empty() && !(row.t > rows_.back().t)) {
        throw std::invalid_argument("metrics timestamps must be strictly increasing");
    }
    rows_.push_back(std::move(row));
}

}  // namespace ergosense
