#pragma once

#include <cstddef>

#include "smd/common.hpp"

namespace smd {

enum class RegionKind { StandardSimplex, BoundedSimplex, LinearPolytope };

/// A mixture experimental region: the standard simplex T_p, a
/// box-constrained simplex, or a general linear-constraint polytope
/// intersected with the sum-to-one hyperplane.
class Region {
public:
    static Region simplex(int p);
    static Region bounded(const Vec& lower, const Vec& upper);
    static Region polytope(const Mat& A, const Vec& b, const Mat& C, const Vec& d);

    int dim() const { return p_; }
    RegionKind kind() const { return kind_; }
    /// True when the region has no strictly interior point (zero volume
    /// within the constraint hyperplanes).
    bool degenerate() const { return degenerate_; }

    const Vec& lower() const { return lower_; }
    const Vec& upper() const { return upper_; }

    bool contains(const Vec& x, double tol = 1e-9) const;
    /// Euclidean-nearest feasible point. Idempotent on feasible input.
    Vec project(const Vec& x) const;
    /// A strictly feasible point when one exists (normalized slack >= 1e-6),
    /// otherwise the single feasible point of a degenerate region.
    Vec interior_point() const { return interior_; }
    Points sample_uniform(std::size_t count, Rng& rng) const;

private:
    Region() = default;
    void finalize();
    Vec hit_and_run_step(Vec x, Rng& rng) const;
    Points hit_and_run(std::size_t count, Rng& rng) const;
    double min_normalized_slack(const Vec& x) const;

    int p_ = 0;
    RegionKind kind_ = RegionKind::StandardSimplex;
    Vec lower_, upper_;          // BoundedSimplex only
    // Canonical constraint view, built for every kind:
    Mat ineq_A_;                 // ineq_A x <= ineq_b
    Vec ineq_b_;
    Mat eq_C_;                   // eq_C x = eq_d (includes the ones row)
    Vec eq_d_;
    Mat eq_pinv_;                // pseudo-inverse of eq_C
    Mat null_proj_;              // projector onto null(eq_C)
    Vec interior_;
    bool degenerate_ = false;
};

}  // namespace smd
