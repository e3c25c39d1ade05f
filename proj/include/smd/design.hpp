#pragma once

#include <vector>

#include "smd/common.hpp"
#include "smd/region.hpp"

namespace smd {

/// A design of n points partitioned into K slices by 1-based labels.
struct SlicedDesign {
    Points points;
    std::vector<int> slice_of;  // 1..K, one label per point
    int num_slices = 0;

    int n() const { return static_cast<int>(points.size()); }
    std::vector<int> sizes() const;
    /// Per-slice lists of point indices (0-based into `points`).
    std::vector<std::vector<int>> slice_indices() const;
    Points slice_points(int k) const;  // k is 1-based

    /// Checks partition structure and region membership.
    void validate(const Region& region, double tol = 1e-9) const;
};

}  // namespace smd
