#include "smd/design.hpp"

#include <stdexcept>

namespace smd {

std::vector<int> SlicedDesign::sizes() const {
    std::vector<int> out(num_slices, 0);
    for (int lbl : slice_of) {
        if (lbl < 1 || lbl > num_slices)
            throw std::invalid_argument("design: slice label out of range");
        ++out[lbl - 1];
    }
    return out;
}

std::vector<std::vector<int>> SlicedDesign::slice_indices() const {
    std::vector<std::vector<int>> out(num_slices);
    for (int i = 0; i < n(); ++i) {
        int lbl = slice_of[i];
        if (lbl < 1 || lbl > num_slices)
            throw std::invalid_argument("design: slice label out of range");
        out[lbl - 1].push_back(i);
    }
    return out;
}

Points SlicedDesign::slice_points(int k) const {
    Points out;
    for (int i = 0; i < n(); ++i)
        if (slice_of[i] == k) out.push_back(points[i]);
    return out;
}

void SlicedDesign::validate(const Region& region, double tol) const {
    if (points.size() != slice_of.size())
        throw std::invalid_argument("design: label count differs from point count");
    sizes();  // range check
    for (const Vec& x : points)
        if (!region.contains(x, tol))
            throw std::invalid_argument("design: point outside the region");
}

}  // namespace smd
