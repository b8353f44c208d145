#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "ergosense/types.hpp"

namespace ergosense {

// Regular cell-centred grid over the unit box. Flat index is x-fastest:
// idx = ix + res * (iy + res * iz).
struct GridSpec {
    int dim = 2;
    int res = 64;

    GridSpec() = default;
    GridSpec(int dimension, int resolution) : dim(dimension), res(resolution) {
        if (dim != 2 && dim != 3) throw std::invalid_argument("grid dimension must be 2 or 3");
        if (res < 1) throw std::invalid_argument("grid resolution must be positive");
    }

    std::size_t size() const {
        std::size_t n = 1;
        for (int d = 0; d < dim; ++d) n *= static_cast<std::size_t>(res);
        return n;
    }

    double cell_width() const { return 1.0 / res; }
    double cell_volume() const { return std::pow(cell_width(), dim); }
    double axis_center(int i) const { return (i + 0.5) / res; }

    Vec cell_center(std::size_t idx) const {
        Vec x(dim);
        for (int d = 0; d < dim; ++d) {
            x(d) = axis_center(static_cast<int>(idx % res));
            idx /= res;
        }
        return x;
    }

    bool operator==(const GridSpec&) const = default;
};

}  // namespace ergosense
