#pragma once

#include <Eigen/Core>

namespace ergosense {

inline constexpr int kMaxDim = 3;

// Runtime-sized (2 or 3) vectors with inline storage, so hot loops never allocate.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using StateVec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 2 * kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

inline Vec make_vec(std::initializer_list<double> values) {
    Vec v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v(i++) = x;
    return v;
}

inline bool in_unit_box(const Vec& x, double tol = 0.0) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (!(x(i) >= -tol && x(i) <= 1.0 + tol)) return false;
    }
    return true;
}

}  // namespace ergosense
