#pragma once

#include <cstddef>
#include <vector>

#include "ergosense/shapes.hpp"

namespace ergosense {

using Dataset = std::vector<Measurement>;

struct DecimationCaps {
    std::size_t contact_cap = 400;
    std::size_t free_cap = 1600;
    double cell = 0.02;
};

std::size_t count_label(const Dataset& data, int label);

// Bounds the estimator's training set. A label class under its cap is kept
// verbatim. Over-cap free-space points are thinned to the most recent one per
// grid cell, over-cap contacts the same on a half-size grid; whatever still
// exceeds the cap keeps its most recent members. Output is in time order.
Dataset decimate(const Dataset& data, const DecimationCaps& caps);

}  // namespace ergosense
